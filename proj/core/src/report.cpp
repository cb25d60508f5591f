#include "ppse/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace ppse {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string tag_field(int v) { return v < 0 ? "-" : std::to_string(v); }

using ordered_json = nlohmann::ordered_json;

ordered_json weights_json(const std::vector<double>& w) {
  ordered_json arr = ordered_json::array();
  for (double v : w) arr.push_back(v);
  return arr;
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(const std::string& s) {
  if (s == "table") return ReportFormat::Table;
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

std::string to_table(const RunReport& rep) {
  std::ostringstream os;
  os << "scenario: " << rep.scenario << "  (mode: " << rep.mode << ")\n";
  os << "pre-selection success:  " << fixed6(rep.pre_success) << "\n";
  os << "post-selection success: " << fixed6(rep.post_success) << "\n";
  if (rep.prob_found) {
    os << "prob found: " << fixed6(*rep.prob_found) << "\n";
  }
  os << "\noutcome        k  l  m  weight    prob      oracle\n";
  for (const auto& row : rep.outcomes) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-2s %-2s %-2s %s  %s  %s\n",
                  row.tag.label.c_str(), tag_field(row.tag.k).c_str(),
                  tag_field(row.tag.l).c_str(), tag_field(row.tag.m).c_str(),
                  fixed6(row.weight).c_str(), fixed6(row.prob).c_str(),
                  fixed6(row.oracle).c_str());
    os << line;
  }
  os << "\neigenvalue  prob      closed    oracle\n";
  for (const auto& row : rep.eigenvalues) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-11d %s  %-8s  %s\n", row.k,
                  fixed6(row.prob).c_str(),
                  row.closed_form ? fixed6(*row.closed_form).c_str() : "-",
                  fixed6(row.oracle).c_str());
    os << line;
  }
  if (rep.timesym) {
    os << "\ntime symmetry:\n";
    os << "  forward weights:";
    for (double w : rep.timesym->forward_weights) os << " " << fixed6(w);
    os << "\n";
    for (const auto& pr : rep.timesym->processes) {
      os << "  process " << to_string(pr.process) << ": max deviation "
         << pr.max_deviation << "\n";
    }
    os << "  recovered initial state: "
       << (rep.timesym->recovered_initial ? "yes" : "no") << " (overlap "
       << fixed6(rep.timesym->recovery_overlap) << ")\n";
  }
  if (rep.reset) {
    os << "\nreset variant:\n  weights:";
    for (double w : rep.reset->weights) os << " " << fixed6(w);
    os << "\n  max deviation from forward: " << fixed6(rep.reset->max_deviation)
       << "\n";
  }
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  if (!rep.note.empty()) os << "note: " << rep.note << "\n";
  return os.str();
}

std::string to_json(const RunReport& rep) {
  ordered_json j;
  j["scenario"] = rep.scenario;
  j["mode"] = rep.mode;
  j["pre_success"] = rep.pre_success;
  j["post_success"] = rep.post_success;
  if (rep.prob_found) j["prob_found"] = *rep.prob_found;

  ordered_json outcomes = ordered_json::array();
  for (const auto& row : rep.outcomes) {
    ordered_json o;
    o["label"] = row.tag.label;
    o["k"] = row.tag.k;
    o["l"] = row.tag.l;
    o["m"] = row.tag.m;
    o["weight"] = row.weight;
    o["prob"] = row.prob;
    o["oracle"] = row.oracle;
    outcomes.push_back(std::move(o));
  }
  j["outcomes"] = std::move(outcomes);

  ordered_json eigen = ordered_json::array();
  for (const auto& row : rep.eigenvalues) {
    ordered_json o;
    o["k"] = row.k;
    o["prob"] = row.prob;
    if (row.closed_form) {
      o["closed_form"] = *row.closed_form;
    } else {
      o["closed_form"] = nullptr;
    }
    o["oracle"] = row.oracle;
    eigen.push_back(std::move(o));
  }
  j["eigenvalues"] = std::move(eigen);

  if (rep.timesym) {
    ordered_json t;
    t["forward_weights"] = weights_json(rep.timesym->forward_weights);
    ordered_json procs = ordered_json::array();
    for (const auto& pr : rep.timesym->processes) {
      ordered_json p;
      p["process"] = to_string(pr.process);
      p["weights"] = weights_json(pr.weights);
      p["max_deviation"] = pr.max_deviation;
      procs.push_back(std::move(p));
    }
    t["processes"] = std::move(procs);
    t["max_deviation"] = rep.timesym->max_deviation;
    t["recovered_initial"] = rep.timesym->recovered_initial;
    t["recovery_overlap"] = rep.timesym->recovery_overlap;
    j["timesym"] = std::move(t);
  } else {
    j["timesym"] = nullptr;
  }

  if (rep.reset) {
    ordered_json r;
    r["weights"] = weights_json(rep.reset->weights);
    r["max_deviation"] = rep.reset->max_deviation;
    j["reset"] = std::move(r);
  } else {
    j["reset"] = nullptr;
  }

  j["warnings"] = rep.warnings;
  j["note"] = rep.note;
  return j.dump(2) + "\n";
}

std::string to_csv(const RunReport& rep) {
  std::ostringstream os;
  os << "label,k,l,m,probability\n";
  char buf[64];
  for (const auto& row : rep.outcomes) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.prob);
    os << row.tag.label << "," << row.tag.k << "," << row.tag.l << "," << row.tag.m
       << "," << buf << "\n";
  }
  return os.str();
}

std::string format_report(const RunReport& rep, ReportFormat f) {
  switch (f) {
    case ReportFormat::Table: return to_table(rep);
    case ReportFormat::Json: return to_json(rep);
    case ReportFormat::Csv: return to_csv(rep);
  }
  return "";
}

}  // namespace ppse
