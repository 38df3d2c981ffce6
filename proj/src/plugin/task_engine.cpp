// SPDX-License-Identifier: Apache-2.0
#include "minipacs/plugin/task_engine.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "minipacs/error.hpp"

namespace minipacs::plugin {

std::string_view task_state_name(TaskState state) noexcept {
  switch (state) {
    case TaskState::Queued: return "queued";
    case TaskState::Running: return "running";
    case TaskState::Done: return "done";
    case TaskState::Failed: return "failed";
  }
  return "unknown";
}

void TaskProgress::set(double fraction) { engine_.set_progress(id_, fraction); }

TaskEngine::TaskEngine(std::size_t workers) {
  workers = std::max<std::size_t>(workers, 1);
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { run_worker(); });
}

TaskEngine::~TaskEngine() { shutdown(); }

TaskSnapshot TaskEngine::submit(Job job) {
  std::lock_guard lock(mutex_);
  if (stopping_) throw Error(Errc::ProtocolError, "task engine is shutting down");
  auto rec = std::make_shared<Record>();
  rec->snapshot.id = fmt::format("task-{}", next_id_++);
  rec->job = std::move(job);
  records_.emplace(rec->snapshot.id, rec);
  order_.push_back(rec->snapshot.id);
  queue_.push_back(rec);
  changed_.notify_all();
  return rec->snapshot;
}

std::optional<TaskSnapshot> TaskEngine::status(std::string_view id) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second->snapshot;
}

std::vector<TaskSnapshot> TaskEngine::list() const {
  std::lock_guard lock(mutex_);
  std::vector<TaskSnapshot> out;
  for (auto& id : order_) out.push_back(records_.find(id)->second->snapshot);
  return out;
}

TaskSnapshot TaskEngine::wait(std::string_view id) const {
  std::unique_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(Errc::NotFound, fmt::format("no task {}", id));
  auto rec = it->second;
  changed_.wait(lock, [&] {
    return rec->snapshot.state == TaskState::Done || rec->snapshot.state == TaskState::Failed;
  });
  return rec->snapshot;
}

void TaskEngine::drain() {
  std::unique_lock lock(mutex_);
  changed_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
}

void TaskEngine::shutdown() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
    changed_.notify_all();
  }
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  std::lock_guard lock(mutex_);
  workers_.clear();
}

void TaskEngine::set_progress(const std::string& id, double fraction) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end() || it->second->snapshot.state != TaskState::Running) return;
  fraction = std::clamp(fraction, 0.0, 0.999);
  it->second->snapshot.progress = std::max(it->second->snapshot.progress, fraction);
}

void TaskEngine::run_worker() {
  for (;;) {
    std::shared_ptr<Record> rec;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping and nothing left
      rec = queue_.front();
      queue_.pop_front();
      rec->snapshot.state = TaskState::Running;
      ++active_;
    }

    TaskProgress progress(*this, rec->snapshot.id);
    auto start = std::chrono::steady_clock::now();
    Report report;
    bool failed = false;
    try {
      report = rec->job(progress);
    } catch (const std::exception& e) {
      failed = true;
      report = Report{};
      report.errors.push_back({"", e.what()});
      report.files_seen = 1;
    }
    if (!report.consistent()) {
      failed = true;
      report.errors.push_back({"", "indexing report is inconsistent"});
      report.files_seen = report.files_indexed + report.errors.size();
    }
    if (report.elapsed.count() == 0) {
      report.elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    }

    std::lock_guard lock(mutex_);
    rec->job = nullptr;
    rec->snapshot.report = std::move(report);
    rec->snapshot.state = failed ? TaskState::Failed : TaskState::Done;
    if (!failed) rec->snapshot.progress = 1.0;
    --active_;
    changed_.notify_all();
  }
}

}  // namespace minipacs::plugin
