#pragma once

#include <stdexcept>
#include <string>

namespace hotspan {

/** Malformed input file (edge list or dataset). Message carries the line number. */
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/** Observation data violates a structural invariant (orphan node, bad ids, ...). */
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/** EM fit cannot proceed (empty pair partition, non-finite likelihood, ...). */
class fit_error : public std::runtime_error {
 public:
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

/** Span detection cannot proceed (no candidate spans, all fits failed, ...). */
class detect_error : public std::runtime_error {
 public:
  explicit detect_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hotspan
