#include "cssk/io/csv.hpp"

#include <charconv>
#include <fstream>

namespace cssk::io {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  return f;
}

void finish_csv(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) raise(ErrorCode::IoError, "short write to '" + path + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_roc_csv(const std::string& path, const eval::CompareReport& report) {
  std::ofstream f = open_csv(path);
  f << "threshold,detections,frames,false_alarms,method\n";
  for (const eval::MethodReport& mr : report.methods) {
    for (const eval::RocPoint& p : mr.roc) {
      f << format_double(p.threshold) << ',' << p.detections << ',' << report.frame_count
        << ',' << p.false_alarms << ',' << mr.method << '\n';
    }
  }
  finish_csv(f, path);
}

void write_timing_csv(const std::string& path, const eval::CompareReport& report) {
  std::ofstream f = open_csv(path);
  f << "method,frames,total_seconds,per_frame_seconds\n";
  for (const eval::MethodReport& mr : report.methods) {
    const double per_frame =
        report.frame_count > 0 ? mr.wall_seconds / report.frame_count : 0.0;
    f << mr.method << ',' << report.frame_count << ',' << format_double(mr.wall_seconds)
      << ',' << format_double(per_frame) << '\n';
  }
  finish_csv(f, path);
}

void write_trace_csv(const std::string& path,
                     const std::vector<solvers::SolveTracePoint>& trace) {
  std::ofstream f = open_csv(path);
  f << "iter,objective,gradient_norm\n";
  for (const solvers::SolveTracePoint& p : trace) {
    f << p.iter << ',' << format_double(p.objective) << ','
      << format_double(p.gradient_norm) << '\n';
  }
  finish_csv(f, path);
}

void write_exceedances_csv(const std::string& path,
                           std::span<const std::vector<Exceedance>> per_frame) {
  std::ofstream f = open_csv(path);
  f << "frame,rank,row,col,score\n";
  for (size_t frame = 0; frame < per_frame.size(); ++frame) {
    for (size_t rank = 0; rank < per_frame[frame].size(); ++rank) {
      const Exceedance& xcd = per_frame[frame][rank];
      f << frame << ',' << rank << ',' << xcd.row << ',' << xcd.col << ','
        << format_double(xcd.score) << '\n';
    }
  }
  finish_csv(f, path);
}

void write_truth_csv(const std::string& path, const SceneTruth& truth) {
  std::ofstream f = open_csv(path);
  f << "kind,row,col,amplitude,dy,dx\n";
  auto row = [&](const char* kind, const PointSource& s) {
    f << kind << ',' << s.row << ',' << s.col << ',' << format_double(s.amplitude) << ','
      << format_double(s.dy) << ',' << format_double(s.dx) << '\n';
  };
  row("target", truth.target);
  for (const PointSource& s : truth.clutter) row("clutter", s);
  finish_csv(f, path);
}

void write_mask_scores_csv(const std::string& path,
                           const std::vector<maskselect::MaskScore>& scores) {
  std::ofstream f = open_csv(path);
  f << "mask_seed,fa_count,recon_mse\n";
  for (const maskselect::MaskScore& s : scores) {
    f << s.mask_seed << ',';
    if (s.fa_count) f << *s.fa_count;
    f << ',';
    if (s.recon_mse) f << format_double(*s.recon_mse);
    f << '\n';
  }
  finish_csv(f, path);
}

}  // namespace cssk::io
