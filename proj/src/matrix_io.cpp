#include "dfrc/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dfrc {

std::string format_complex(const Complex& z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

Complex parse_complex(const std::string& token) {
  if (token.empty() || token.back() != 'j') {
    throw IoError("parse_complex: expected trailing 'j' in '" + token + "'");
  }
  const std::string body = token.substr(0, token.size() - 1);
  // Split at the sign of the imaginary part: the last '+'/'-' that is not an
  // exponent sign and not the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    throw IoError("parse_complex: missing imaginary part in '" + token + "'");
  }
  try {
    std::size_t used = 0;
    const double re = std::stod(body.substr(0, split), &used);
    if (used != split) throw IoError("");
    const std::string im_str = body.substr(split);
    const double im = std::stod(im_str, &used);
    if (used != im_str.size()) throw IoError("");
    return {re, im};
  } catch (const std::exception&) {
    throw IoError("parse_complex: malformed entry '" + token + "'");
  }
}

void write_complex_matrix(const std::string& path, const CMat& m) {
  std::ofstream out(path);
  if (!out) throw IoError("write_complex_matrix: cannot open '" + path + "'");
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_complex(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write_complex_matrix: write failed for '" + path + "'");
}

CMat read_complex_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_complex_matrix: cannot open '" + path + "'");
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw IoError("read_complex_matrix: bad header in '" + path + "'");
  }
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string token;
      if (!(in >> token)) {
        throw IoError("read_complex_matrix: truncated data in '" + path + "'");
      }
      m(i, j) = parse_complex(token);
    }
  }
  return m;
}

}  // namespace dfrc
