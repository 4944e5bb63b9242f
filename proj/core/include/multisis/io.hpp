#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "multisis/instance.hpp"

namespace multisis {

// Parse failure with 1-based line and column of the offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int col);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Instance text format: "SIS n m q\n" then m lines of n base-10 residues
// separated by single spaces, LF endings, no trailing whitespace.
void write_instance(std::ostream& os, const SisInstance& inst);
void write_instance_file(const std::string& path, const SisInstance& inst);
SisInstance read_instance(std::istream& is);
SisInstance read_instance_file(const std::string& path);

// Solution text format: "SOL m count\n" then count lines of m signed
// base-10 integers.
struct SolutionFile {
  int m = 0;
  std::vector<std::vector<i64>> rows;
};

void write_solutions(std::ostream& os, int m,
                     const std::vector<CombinationVector>& solutions);
void write_solutions_file(const std::string& path, int m,
                          const std::vector<CombinationVector>& solutions);
SolutionFile read_solutions(std::istream& is);
SolutionFile read_solutions_file(const std::string& path);

}  // namespace multisis
