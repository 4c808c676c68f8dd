#include "job_pool.hpp"

namespace mazescope::service {

std::string_view job_status_name(JobStatus status) noexcept {
  switch (status) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kSucceeded: return "succeeded";
    case JobStatus::kFailed: return "failed";
    case JobStatus::kCancelled: return "cancelled";
  }
  return "unknown";
}

JobPool::JobPool(std::size_t workers) {
  if (workers == 0) workers = 1;
  for (std::size_t i = 0; i < workers; ++i) {
    workers_.emplace_back([this](std::stop_token stop) { run(stop); });
  }
}

JobPool::~JobPool() {
  {
    std::lock_guard lock(mutex_);
    for (auto& job : queue_) job->stop.request_stop();
    for (auto& [id, job] : jobs_) job->stop.request_stop();
  }
  for (auto& w : workers_) w.request_stop();
  ready_.notify_all();
  workers_.clear();
}

std::shared_ptr<Job> JobPool::submit(std::string session_id, Job::Work work) {
  auto job = std::make_shared<Job>();
  job->session_id = std::move(session_id);
  job->work = std::move(work);
  {
    std::lock_guard lock(mutex_);
    job->id = "job-" + std::to_string(next_++);
    jobs_.emplace(job->id, job);
    queue_.push_back(job);
  }
  ready_.notify_one();
  return job;
}

std::shared_ptr<Job> JobPool::find(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  return it == jobs_.end() ? nullptr : it->second;
}

void JobPool::cancel(Job& job) {
  job.stop.request_stop();
  JobStatus expected = JobStatus::kQueued;
  job.status.compare_exchange_strong(expected, JobStatus::kCancelled);
}

void JobPool::run(std::stop_token stop) {
  while (true) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      if (!ready_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      job = queue_.front();
      queue_.pop_front();
    }
    JobStatus expected = JobStatus::kQueued;
    if (!job->status.compare_exchange_strong(expected, JobStatus::kRunning)) continue;
    analysis::RunControl control{job->stop.get_token(), [&job](double p) { job->progress = p; }};
    try {
      std::string result = job->work(control);
      {
        std::lock_guard lock(job->mutex);
        job->result = std::move(result);
      }
      job->progress = 1.0;
      job->status = JobStatus::kSucceeded;
    } catch (const Error& e) {
      {
        std::lock_guard lock(job->mutex);
        job->error = e.what();
      }
      job->status = e.code() == ErrorCode::kCancelled ? JobStatus::kCancelled : JobStatus::kFailed;
    } catch (const std::exception& e) {
      {
        std::lock_guard lock(job->mutex);
        job->error = e.what();
      }
      job->status = JobStatus::kFailed;
    }
  }
}

}  // namespace mazescope::service
