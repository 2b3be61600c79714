#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mapft/benchmark.hpp"
#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"
#include "mapft/tracking/book.hpp"
#include "mapft/tracking/events.hpp"

namespace mapft {

inline constexpr std::string_view kEventLogFormat = "mapft-event-log";
inline constexpr int kEventLogVersion = 1;

/// Event log plus derived snapshot.
///
/// On disk a store directory holds `events.jsonl` and `snapshot.jsonl`. The
/// log starts with a format header line; events follow one JSON object per
/// line, and each committed group ends with a `{"type":"commit"}` line.
/// Events after the last commit marker are an interrupted write and are
/// dropped on open. The snapshot is rewritten after every commit and can
/// always be regenerated from the log.
class Store {
 public:
  /// Called before the i-th line of a commit is written; tests throw from it
  /// to emulate a crash part-way through a write.
  using WriteHook = std::function<void(std::size_t)>;

  Store() = default;

  static Store open(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Store store;
    store.dir_ = dir;
    const auto log_path = dir / "events.jsonl";
    if (!fs::exists(log_path)) {
      write_file(log_path, header_line());
      store.write_snapshot();
      return store;
    }
    const auto text = read_file(log_path);
    const auto lines = detail::split_lines(text);
    if (lines.empty() || lines.front() != detail::trim(header_line()))
      throw Error(Errc::CorruptLog, "missing or unsupported event log header");

    std::size_t committed_bytes = header_line().size();
    std::size_t offset = lines.front().size() + 1;
    std::vector<Event> pending;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto line = lines[i];
      const bool complete = offset + line.size() < text.size();  // newline-terminated
      offset += line.size() + 1;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !complete) {
        if (i + 1 == lines.size()) break;  // torn final line
        throw Error(Errc::CorruptLog, "unreadable event log line " + std::to_string(i + 1));
      }
      if (j.value("type", std::string{}) == "commit") {
        for (auto& e : pending) {
          store.book_.apply(e);
          store.log_.push_back(std::move(e));
        }
        pending.clear();
        committed_bytes = std::min(offset, text.size());
        continue;
      }
      pending.push_back(event_from_json(j));
    }
    if (committed_bytes < text.size()) std::filesystem::resize_file(log_path, committed_bytes);
    store.write_snapshot();
    return store;
  }

  bool persistent() const noexcept { return !dir_.empty(); }
  const std::filesystem::path& directory() const noexcept { return dir_; }
  const RecordBook& book() const noexcept { return book_; }
  const std::vector<Event>& log() const noexcept { return log_; }

  void set_write_hook(WriteHook hook) { hook_ = std::move(hook); }

  /// Applies `events` all-or-nothing. The events are checked against a copy
  /// of the book first; a BoundConflict or other error leaves the store
  /// untouched.
  void commit(const std::vector<Event>& events) {
    if (broken_) throw Error(Errc::StorageFailure, "store must be reopened after a failed write");
    if (events.empty()) return;
    RecordBook staged = book_;
    for (const auto& e : events) staged.apply(e);
    if (persistent()) append(events);
    book_ = std::move(staged);
    log_.insert(log_.end(), events.begin(), events.end());
    if (persistent()) write_snapshot();
  }

  /// Revokes every lower bound contributed by `batch_id`; returns the
  /// recomputed records of the affected instances.
  std::vector<InstanceRecord> revoke_batch_lower_bounds(const std::string& batch_id,
                                                        const std::string& reason = "revoked") {
    if (!book_.has_batch(batch_id)) throw Error(Errc::UnknownBatch, "unknown batch " + batch_id);
    const auto affected = book_.lower_bound_holdings(batch_id);
    commit({BatchRevoked{batch_id, reason}});
    std::vector<InstanceRecord> out;
    for (const auto& id : affected) out.push_back(*book_.find(id));
    return out;
  }

 private:
  static std::string header_line() {
    return json{{"format", kEventLogFormat}, {"version", kEventLogVersion}}.dump() + "\n";
  }

  void append(const std::vector<Event>& events) {
    const auto path = dir_ / "events.jsonl";
    const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd < 0) throw Error(Errc::StorageFailure, "cannot open " + path.string() + ": " + std::strerror(errno));
    auto write_line = [&](const std::string& line) {
      std::size_t done = 0;
      while (done < line.size()) {
        const auto n = ::write(fd, line.data() + done, line.size() - done);
        if (n < 0) {
          if (errno == EINTR) continue;
          throw Error(Errc::StorageFailure, std::string("write failed: ") + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
      }
    };
    try {
      std::size_t i = 0;
      for (const auto& e : events) {
        if (hook_) hook_(i);
        write_line(event_to_json(e).dump() + "\n");
        ++i;
      }
      if (hook_) hook_(i);
      write_line(json{{"type", "commit"}, {"events", events.size()}}.dump() + "\n");
      if (::fsync(fd) != 0) throw Error(Errc::StorageFailure, "fsync failed");
    } catch (...) {
      ::close(fd);
      broken_ = true;
      throw;
    }
    ::close(fd);
  }

  void write_snapshot() const {
    const auto tmp = dir_ / "snapshot.jsonl.tmp";
    write_file(tmp, book_.snapshot_text());
    std::filesystem::rename(tmp, dir_ / "snapshot.jsonl");
  }

  std::filesystem::path dir_;
  std::vector<Event> log_;
  RecordBook book_;
  WriteHook hook_;
  bool broken_ = false;
};

}  // namespace mapft
