#include "multisis/io.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace multisis {

ParseError::ParseError(const std::string& what, int line, int col)
    : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ")"),
      line_(line),
      col_(col) {}

namespace {

// Strict cursor over the whole text: single spaces between tokens, LF line
// endings, no trailing whitespace. Tracks 1-based line/column.
class Cursor {
 public:
  explicit Cursor(std::string text) : text_(std::move(text)) {}

  int line() const { return line_; }
  int col() const { return col_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col_);
  }

  void expect_space() {
    if (pos_ >= text_.size() || text_[pos_] != ' ')
      fail("expected a single space");
    advance();
  }

  void expect_newline() {
    if (pos_ >= text_.size()) fail("expected end of line");
    if (text_[pos_] == ' ') fail("trailing whitespace");
    if (text_[pos_] != '\n') fail("expected end of line");
    advance();
  }

  void expect_end() {
    if (pos_ < text_.size()) fail("trailing content after final line");
  }

  std::string token() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\n' &&
           text_[pos_] != '\r')
      advance();
    if (pos_ == start) fail("expected a token");
    return text_.substr(start, pos_ - start);
  }

  u64 unsigned_number(u64 max) {
    const int l = line_, c = col_;
    std::string tok = token();
    u64 v = 0;
    for (char ch : tok) {
      if (ch < '0' || ch > '9')
        throw ParseError("expected an unsigned integer", l, c);
      if (v > (std::numeric_limits<u64>::max() - u64(ch - '0')) / 10)
        throw ParseError("integer overflows 64 bits", l, c);
      v = v * 10 + u64(ch - '0');
    }
    if (tok.size() > 1 && tok[0] == '0')
      throw ParseError("leading zero in integer", l, c);
    if (v > max) throw ParseError("integer out of range", l, c);
    return v;
  }

  i64 signed_number() {
    const int l = line_, c = col_;
    std::string tok = token();
    bool neg = false;
    std::size_t i = 0;
    if (i < tok.size() && (tok[i] == '-' || tok[i] == '+')) {
      neg = tok[i] == '-';
      ++i;
    }
    if (i >= tok.size()) throw ParseError("expected an integer", l, c);
    u64 v = 0;
    for (; i < tok.size(); ++i) {
      if (tok[i] < '0' || tok[i] > '9')
        throw ParseError("expected an integer", l, c);
      if (v > (u64(1) << 62)) throw ParseError("integer out of range", l, c);
      v = v * 10 + u64(tok[i] - '0');
    }
    return neg ? -i64(v) : i64(v);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string slurp(std::istream& is) {
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string slurp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return slurp(f);
}

}  // namespace

void write_instance(std::ostream& os, const SisInstance& inst) {
  os << "SIS " << inst.n() << ' ' << inst.m() << ' ' << inst.q() << '\n';
  for (int r = 0; r < inst.m(); ++r) {
    for (int c = 0; c < inst.n(); ++c) {
      if (c) os << ' ';
      os << inst.at(r, c);
    }
    os << '\n';
  }
}

void write_instance_file(const std::string& path, const SisInstance& inst) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  write_instance(f, inst);
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

SisInstance parse_instance(Cursor& cur) {
  const int magic_line = cur.line(), magic_col = cur.col();
  if (cur.token() != "SIS")
    throw ParseError("expected SIS header", magic_line, magic_col);
  cur.expect_space();
  const u64 n = cur.unsigned_number(u64(std::numeric_limits<int>::max()));
  cur.expect_space();
  const u64 m = cur.unsigned_number(u64(std::numeric_limits<int>::max()));
  cur.expect_space();
  const u64 q = cur.unsigned_number((u64(1) << kMaxModulusBits) - 1);
  cur.expect_newline();
  if (n < 1) cur.fail("n must be positive");
  if (m <= n) cur.fail("m must exceed n");
  if (!valid_modulus(q)) cur.fail("q is not a prime below 2^62");
  std::vector<u64> entries;
  entries.reserve(std::size_t(m) * std::size_t(n));
  for (u64 r = 0; r < m; ++r) {
    for (u64 c = 0; c < n; ++c) {
      if (c) cur.expect_space();
      const u64 v = cur.unsigned_number(q - 1);
      entries.push_back(v);
    }
    cur.expect_newline();
  }
  cur.expect_end();
  return SisInstance(int(n), int(m), q, std::move(entries));
}

}  // namespace

SisInstance read_instance(std::istream& is) {
  Cursor cur(slurp(is));
  return parse_instance(cur);
}

SisInstance read_instance_file(const std::string& path) {
  Cursor cur(slurp_file(path));
  return parse_instance(cur);
}

void write_solutions(std::ostream& os, int m,
                     const std::vector<CombinationVector>& solutions) {
  os << "SOL " << m << ' ' << solutions.size() << '\n';
  for (const auto& s : solutions) {
    const auto dense = s.to_dense(m);
    for (int i = 0; i < m; ++i) {
      if (i) os << ' ';
      os << dense[std::size_t(i)];
    }
    os << '\n';
  }
}

void write_solutions_file(const std::string& path, int m,
                          const std::vector<CombinationVector>& solutions) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  write_solutions(f, m, solutions);
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

SolutionFile parse_solutions(Cursor& cur) {
  const int magic_line = cur.line(), magic_col = cur.col();
  if (cur.token() != "SOL")
    throw ParseError("expected SOL header", magic_line, magic_col);
  cur.expect_space();
  const u64 m = cur.unsigned_number(u64(std::numeric_limits<int>::max()));
  cur.expect_space();
  const u64 count = cur.unsigned_number(u64(1) << 40);
  cur.expect_newline();
  if (m < 1) cur.fail("m must be positive");
  SolutionFile out;
  out.m = int(m);
  out.rows.reserve(count);
  for (u64 r = 0; r < count; ++r) {
    std::vector<i64> row(m);
    for (u64 c = 0; c < m; ++c) {
      if (c) cur.expect_space();
      row[c] = cur.signed_number();
    }
    cur.expect_newline();
    out.rows.push_back(std::move(row));
  }
  cur.expect_end();
  return out;
}

}  // namespace

SolutionFile read_solutions(std::istream& is) {
  Cursor cur(slurp(is));
  return parse_solutions(cur);
}

SolutionFile read_solutions_file(const std::string& path) {
  Cursor cur(slurp_file(path));
  return parse_solutions(cur);
}

}  // namespace multisis
