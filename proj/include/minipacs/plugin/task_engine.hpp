// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "minipacs/plugin/report.hpp"

namespace minipacs::plugin {

enum class TaskState { Queued, Running, Done, Failed };

std::string_view task_state_name(TaskState state) noexcept;

/// Report is present iff the task is Done or Failed; progress is 1 iff Done.
struct TaskSnapshot {
  std::string id;
  TaskState state = TaskState::Queued;
  double progress = 0;
  std::optional<Report> report;
};

class TaskEngine;

class TaskProgress {
 public:
  /// Fraction of work completed; clamped below 1 until the task finishes.
  void set(double fraction);

 private:
  friend class TaskEngine;
  TaskProgress(TaskEngine& engine, std::string id) : engine_(engine), id_(std::move(id)) {}

  TaskEngine& engine_;
  std::string id_;
};

/// Fixed worker pool running report-producing jobs in FIFO order. Finished
/// tasks stay queryable for the engine's lifetime.
class TaskEngine {
 public:
  using Job = std::function<Report(TaskProgress&)>;

  explicit TaskEngine(std::size_t workers = 2);
  ~TaskEngine();

  TaskEngine(const TaskEngine&) = delete;
  TaskEngine& operator=(const TaskEngine&) = delete;

  /// Queues the job and returns without waiting for it.
  TaskSnapshot submit(Job job);

  std::optional<TaskSnapshot> status(std::string_view id) const;
  std::vector<TaskSnapshot> list() const;

  /// Blocks until the task is Done or Failed. Throws Error(NotFound) for
  /// unknown ids.
  TaskSnapshot wait(std::string_view id) const;

  /// Blocks until every queued task has finished.
  void drain();

  /// Finishes queued work, then stops the workers. Later submits are
  /// rejected with Error(ProtocolError).
  void shutdown();

 private:
  friend class TaskProgress;

  struct Record {
    TaskSnapshot snapshot;
    Job job;
  };

  void run_worker();
  void set_progress(const std::string& id, double fraction);

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::deque<std::shared_ptr<Record>> queue_;
  std::map<std::string, std::shared_ptr<Record>, std::less<>> records_;
  std::vector<std::string> order_;
  std::size_t active_ = 0;
  std::uint64_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace minipacs::plugin
