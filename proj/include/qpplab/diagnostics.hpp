#pragma once

#include <string>
#include <vector>

namespace qpplab {

// Non-fatal conditions (dropped queries, clamped grades, zero-relevance
// queries) are reported through warn(). By default they go to stderr; a
// WarningCapture in scope collects them instead. The sink is process-wide
// and mutex-protected so worker threads may warn too.
void warn(const std::string& message);

class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages() const;
  std::size_t count() const;
  bool contains(const std::string& needle) const;

 private:
  WarningCapture* previous_;
  std::vector<std::string> messages_;
  friend void warn(const std::string& message);
};

}  // namespace qpplab
