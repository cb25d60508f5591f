#include <cstdio>
#include <sstream>

#include "ppse/scenario.hpp"

namespace ppse {

namespace {

// 17 significant digits: reparsing reproduces the exact double.
std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_amp(Cx z) {
  const double re = z.real(), im = z.imag();
  if (im == 0.0) return fmt_real(re);
  if (re == 0.0) return fmt_real(im) + "i";
  std::string out = fmt_real(re);
  out += (im < 0.0) ? " - " : " + ";
  out += fmt_real(im < 0.0 ? -im : im);
  out += "i";
  return out;
}

void render_matrix(std::ostringstream& os, const std::vector<Cx>& flat, int dim) {
  os << "[";
  for (int r = 0; r < dim; ++r) {
    if (r) os << "; ";
    for (int c = 0; c < dim; ++c) {
      if (c) os << ", ";
      os << fmt_amp(flat[size_t(r * dim + c)]);
    }
  }
  os << "]";
}

}  // namespace

std::string render(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "scenario \"" << spec.name << "\" {\n";

  os << "  space dim = " << spec.dim << " basis = [";
  for (size_t i = 0; i < spec.basis_labels.size(); ++i) {
    if (i) os << ", ";
    os << spec.basis_labels[i];
  }
  os << "]\n";

  for (const auto& st : spec.states) {
    os << "  state " << st.name << " = ";
    for (size_t i = 0; i < st.amps.size(); ++i) {
      if (i) os << ", ";
      os << fmt_amp(st.amps[i]);
    }
    os << "\n";
  }

  for (const auto& u : spec.unitaries) {
    os << "  unitary " << u.name << " = ";
    render_matrix(os, u.entries, u.dim);
    os << "\n";
  }

  if (spec.spectral) {
    os << "  hamiltonian {\n";
    for (const auto& lvl : spec.spectral->levels) {
      os << "    level " << fmt_real(lvl.energy) << " :";
      for (const auto& ref : lvl.vec_refs) os << " " << ref;
      os << "\n";
    }
    os << "  } duration = " << fmt_real(spec.spectral->duration) << "\n";
  }

  os << "  measure {\n";
  os << "    blocks = [";
  for (size_t i = 0; i < spec.measure.blocks.size(); ++i) {
    if (i) os << ", ";
    os << spec.measure.blocks[i];
  }
  os << "]\n";
  os << "    mode = " << spec.measure.mode << "\n";
  if (!spec.measure.basis_ref.empty()) {
    os << "    basis = " << spec.measure.basis_ref << "\n";
  }
  for (const auto& [idx, flat] : spec.measure.dmats) {
    const int sz = spec.measure.blocks[size_t(idx - 1)];
    os << "    d " << idx << " = ";
    render_matrix(os, flat, sz);
    os << "\n";
  }
  os << "  }\n";

  os << "  preselect { basis = " << spec.pre.basis_ref << " index = " << spec.pre.index;
  if (!spec.pre.initial_ref.empty()) os << " initial = " << spec.pre.initial_ref;
  os << " }\n";
  os << "  postselect { basis = " << spec.post.basis_ref
     << " index = " << spec.post.index << " }\n";

  os << "  options { tol = " << fmt_real(spec.options.tol) << " strict_norm = "
     << (spec.options.strict_norm ? "true" : "false")
     << " strict_d = " << (spec.options.strict_d ? "true" : "false")
     << " processes = [";
  for (size_t i = 0; i < spec.options.processes.size(); ++i) {
    if (i) os << ", ";
    os << to_string(spec.options.processes[i]);
  }
  os << "] reset = " << (spec.options.reset ? "true" : "false");
  if (!spec.options.theta_ref.empty()) os << " theta = " << spec.options.theta_ref;
  os << " }\n";

  os << "}\n";
  return os.str();
}

}  // namespace ppse
