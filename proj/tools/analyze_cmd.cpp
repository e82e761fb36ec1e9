#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/signal_analysis.hpp"
#include "treadmill/svg.hpp"

namespace treadmill::cli {

namespace {

struct SpectrumArgs {
  double dc_floor = 5.0;
  bool hann = false;
  bool no_pad = false;
};

signal::SpectrumOptions spectrum_options(const SpectrumArgs& a) {
  signal::SpectrumOptions o;
  o.hann_window = a.hann;
  o.zero_pad = !a.no_pad;
  return o;
}

struct ImpactArgs {
  std::string input;
  std::vector<std::string> channels;
  std::string out = ".";
  SpectrumArgs spectrum;
  double secondary_fraction = 0.1;
};

void run_impact(const ImpactArgs& a) {
  const auto ts = read_time_series_csv(a.input);
  auto channels = a.channels.empty() ? ts.channel_names() : a.channels;
  const auto dir = prepare_output(a.out);

  signal::PeakOptions po;
  po.dc_floor = a.spectrum.dc_floor;
  po.secondary_fraction = a.secondary_fraction;
  po.spectrum = spectrum_options(a.spectrum);

  Report report, peaks;
  report.header = {"channel", "f0", "f0_refined", "bin_width", "amplitude", "A", "lambda", "omega", "xi", "Q",
                   "residual", "peaks"};
  peaks.header = {"channel", "rank", "frequency", "magnitude"};
  CsvTable spectra;
  plot::LinePlot spec_plot{"Impact response spectrum", "frequency (Hz)", "|X|", {}, {}, true, false};

  for (const auto& ch : channels) {
    const auto peak = signal::estimate_natural_frequency(ts, ch, po);
    const auto fit = signal::fit_damping(ts, ch, peak.f0_refined);
    report.add({ch, num(peak.f0), num(peak.f0_refined), num(peak.spectrum.bin_width()), num(peak.amplitude),
                num(fit.amplitude), num(fit.lambda), num(fit.omega), num(fit.xi), num(fit.q), num(fit.residual),
                std::to_string(fit.peak_times.size())});
    for (std::size_t k = 0; k < peak.secondary_peaks.size(); ++k)
      peaks.add({ch, std::to_string(k + 1), num(peak.secondary_peaks[k].first), num(peak.secondary_peaks[k].second)});

    if (spectra.header.empty()) {
      spectra.header.push_back("frequency");
      spectra.columns.push_back(peak.spectrum.frequency);
    }
    spectra.header.push_back(ch);
    spectra.columns.push_back(peak.spectrum.magnitude);
    spec_plot.series.push_back({ch, peak.spectrum.frequency, peak.spectrum.magnitude, {}, false});

    // Signal with the fitted envelope and the peaks used.
    const auto y = ts.channel(ch);
    plot::LinePlot env{fmt::format("Impact decay {} (xi = {:.4f}, Q = {:.1f})", ch, fit.xi, fit.q), "time (s)",
                       "force (N)", {}, {}, false, false};
    plot::Series sig{ch, {}, {}, {}, false}, fitted{"A exp(-lambda t)", {}, {}, {}, false};
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double t = static_cast<double>(i) / ts.rate();
      sig.x.push_back(t);
      sig.y.push_back(y[i]);
      fitted.x.push_back(t);
      fitted.y.push_back(fit.amplitude * std::exp(-fit.lambda * t));
    }
    env.series = {sig, fitted, {"envelope at peaks", fit.peak_times, fit.peak_envelopes, {}, true}};
    write_text_file(dir / fmt::format("impact_decay_{}.svg", ch), plot::render(env));
    note(fmt::format("{}: f0 = {:.2f} Hz (refined {:.3f} Hz), xi = {:.5f}, Q = {:.2f}", ch, peak.f0,
                     peak.f0_refined, fit.xi, fit.q));
  }
  write_report(dir / "impact_report.csv", report);
  write_report(dir / "impact_peaks.csv", peaks);
  write_csv(dir / "impact_spectrum.csv", spectra);
  write_text_file(dir / "impact_spectrum.svg", plot::render(spec_plot));
}

struct NoiseArgs {
  std::vector<std::string> inputs;
  std::vector<double> speeds;
  std::vector<std::string> channels;
  std::string out = ".";
  SpectrumArgs spectrum;
};

void run_noise(const NoiseArgs& a) {
  if (!a.speeds.empty() && a.speeds.size() != a.inputs.size())
    throw ConfigError(fmt::format("{} inputs but {} speeds", a.inputs.size(), a.speeds.size()));
  const auto dir = prepare_output(a.out);
  Report report, spectra;
  report.header = {"speed", "channel", "mean", "band", "min", "max"};
  spectra.header = {"speed", "channel", "frequency", "magnitude"};
  plot::LinePlot spec_plot{"Noise spectrum", "frequency (Hz)", "|X|", {}, {}, true, false};
  std::vector<signal::NoiseReport> all;
  for (std::size_t k = 0; k < a.inputs.size(); ++k) {
    const double speed = a.speeds.empty() ? 0.0 : a.speeds[k];
    const auto ts = read_time_series_csv(a.inputs[k]);
    auto rep = signal::noise_stats(ts, speed, a.channels, spectrum_options(a.spectrum));
    for (const auto& ax : rep.axes) {
      report.add({num(speed), ax.channel, num(ax.mean), num(ax.band), num(ax.minimum), num(ax.maximum)});
      for (std::size_t i = 0; i < ax.spectrum.frequency.size(); ++i)
        spectra.add({num(speed), ax.channel, num(ax.spectrum.frequency[i]), num(ax.spectrum.magnitude[i])});
      spec_plot.series.push_back(
          {fmt::format("{} at {} m/s", ax.channel, speed), ax.spectrum.frequency, ax.spectrum.magnitude, {}, false});
      note(fmt::format("{} m/s {}: band = {:.3f} N (min {:.3f}, max {:.3f})", speed, ax.channel, ax.band, ax.minimum,
                       ax.maximum));
    }
    all.push_back(std::move(rep));
  }
  write_report(dir / "noise_report.csv", report);
  write_report(dir / "noise_spectrum.csv", spectra);
  write_text_file(dir / "noise_spectrum.svg", plot::render(spec_plot));

  if (all.size() > 1) {
    plot::LinePlot bands{"Noise band over belt speed", "belt speed (m/s)", "mean +- 2 sigma (N)", {}, {}, false, false};
    for (std::size_t c = 0; c < all.front().axes.size(); ++c) {
      plot::Series s{all.front().axes[c].channel, {}, {}, {}, false};
      for (const auto& r : all) {
        if (c >= r.axes.size()) continue;
        s.x.push_back(r.belt_speed);
        s.y.push_back(r.axes[c].mean);
        s.band.push_back(r.axes[c].band);
      }
      bands.series.push_back(std::move(s));
    }
    write_text_file(dir / "noise_band.svg", plot::render(bands));
  }
}

void spectrum_flags(CLI::App* cmd, SpectrumArgs& s) {
  cmd->add_option("--dc-floor", s.dc_floor, "Ignore bins below this frequency (Hz)")->capture_default_str();
  cmd->add_flag("--hann", s.hann, "Hann window instead of rectangular");
  cmd->add_flag("--no-pad", s.no_pad, "Do not zero-pad to the next power of two");
}

}  // namespace

void add_analyze_commands(CLI::App& app) {
  auto* analyze = app.add_subcommand("analyze", "Impact and noise analysis of force recordings");
  analyze->require_subcommand(1);

  auto ia = std::make_shared<ImpactArgs>();
  auto* impact = analyze->add_subcommand("impact", "Natural frequency and damping from an impact response");
  impact->add_option("--input", ia->input, "CSV with header time,<channel>...")->required();
  impact->add_option("--channel", ia->channels, "Channel(s) to analyse (default: all)");
  impact->add_option("--secondary-fraction", ia->secondary_fraction,
                     "Report further local maxima above this fraction of the main peak")
      ->capture_default_str();
  spectrum_flags(impact, ia->spectrum);
  impact->add_option("--out", ia->out, "Output directory")->capture_default_str();
  impact->callback([ia] { run_impact(*ia); });

  auto na = std::make_shared<NoiseArgs>();
  auto* noise = analyze->add_subcommand("noise", "Mean, 2-sigma band and spectrum of idle or running recordings");
  noise->add_option("--input", na->inputs, "CSV recording(s); repeat for several belt speeds")->required();
  noise->add_option("--speed", na->speeds, "Belt speed per input (m/s)");
  noise->add_option("--channel", na->channels, "Channel(s) to analyse (default: all)");
  noise->add_flag("--hann", na->spectrum.hann, "Hann window instead of rectangular");
  noise->add_flag("--no-pad", na->spectrum.no_pad, "Do not zero-pad to the next power of two");
  noise->add_option("--out", na->out, "Output directory")->capture_default_str();
  noise->callback([na] { run_noise(*na); });
}

}  // namespace treadmill::cli
