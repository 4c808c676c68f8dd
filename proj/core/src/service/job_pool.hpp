#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "mazescope/analysis/run_control.hpp"

namespace mazescope::service {

enum class JobStatus { kQueued, kRunning, kSucceeded, kFailed, kCancelled };

std::string_view job_status_name(JobStatus status) noexcept;

struct Job {
  using Work = std::function<std::string(const analysis::RunControl&)>;

  std::string id;
  std::string session_id;
  Work work;
  std::stop_source stop;
  std::atomic<JobStatus> status{JobStatus::kQueued};
  std::atomic<double> progress{0.0};

  std::mutex mutex;
  std::string result;  // produced id on success
  std::string error;
};

/// Fixed number of workers draining a FIFO of jobs.
class JobPool {
 public:
  explicit JobPool(std::size_t workers);
  ~JobPool();

  std::shared_ptr<Job> submit(std::string session_id, Job::Work work);
  std::shared_ptr<Job> find(const std::string& job_id) const;
  /// Requests cancellation; queued jobs are cancelled immediately.
  void cancel(Job& job);

 private:
  void run(std::stop_token stop);

  mutable std::mutex mutex_;
  std::condition_variable_any ready_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_ = 1;
  std::vector<std::jthread> workers_;
};

}  // namespace mazescope::service
