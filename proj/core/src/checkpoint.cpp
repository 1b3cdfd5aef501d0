#include "numeracy/nn/checkpoint.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>

#include "numeracy/errors.hpp"

namespace numeracy::nn {
namespace {
constexpr const char* kMagic = "numeracy-checkpoint";
}

void save_checkpoint(std::ostream& out, std::span<const ParamStore* const> stores) {
  std::size_t count = 0;
  for (const auto* s : stores) count += s->params().size();
  out << kMagic << " 1\n" << count << '\n' << std::setprecision(17);
  for (const auto* s : stores) {
    for (const auto& p : s->params()) {
      out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
      for (Eigen::Index i = 0; i < p.value.size(); ++i) out << (i ? " " : "") << p.value.data()[i];
      out << '\n';
    }
  }
}

void load_checkpoint(std::istream& in, std::span<ParamStore* const> stores) {
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version >> count) || magic != kMagic || version != 1)
    throw Error("not a numeracy checkpoint");
  std::map<std::string, Matrix> tensors;
  for (std::size_t t = 0; t < count; ++t) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) throw Error("corrupt checkpoint header");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (!(in >> m.data()[i])) throw Error("corrupt checkpoint values for '" + name + "'");
    tensors[name] = std::move(m);
  }
  for (auto* s : stores) {
    for (auto& p : s->params()) {
      auto it = tensors.find(p.name);
      if (it == tensors.end()) throw Error("checkpoint has no tensor '" + p.name + "'");
      if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols())
        throw Error("checkpoint tensor '" + p.name + "' has the wrong shape");
      p.value = it->second;
    }
  }
}

}  // namespace numeracy::nn
