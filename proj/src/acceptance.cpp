// SPDX-License-Identifier: Apache-2.0
//
// hmsrelay - reconfigurable Huygens metasurface relay simulator
// Copyright (C) 2026 The hmsrelay authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hms/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace hms
{
    namespace
    {
        // Pinned tolerances.
        constexpr double kEnergyTol = 1e-9;
        constexpr double kEnergySeconds = 1.0;
        constexpr double kSteerTolDeg = 3.0;
        constexpr double kSteerSeconds = 10.0;
        constexpr double kSplitLevelDb = 1.0;
        constexpr double kScalingDb = 20.0 * 0.60205999132796239; // 20 log10(4)
        constexpr double kScalingTolDb = 0.2;
        constexpr double kCapacityGapDb = 3.0;
        constexpr double kReciprocityRel = 1e-9;
        constexpr double kFarFieldDb = 0.1;
        constexpr double kProtocolTolDeg = 3.0;
        constexpr double kScenarioSeconds = 60.0;
        constexpr double kBandwidthDeg = 15.0;
        constexpr double kGoldenRel = 1e-4; // four significant figures

        std::string fmt(const char *f, double a)
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, f, a);
            return buf;
        }

        struct Context
        {
            const Config &cfg;
            const AcceptanceOptions &opt;
            PhaseLookupTable lens;
            PhaseLookupTable mirror;

            const PhaseLookupTable &lut(Mode m) const { return m == Mode::Lens ? lens : mirror; }
        };

        CriterionResult energy(const Context &c)
        {
            CriterionResult r;
            std::mt19937_64 rng(c.opt.seed + 1);
            std::uniform_real_distribution<double> scale(0.9, 1.1), freq(20e9, 30e9);
            std::uniform_real_distribution<double> bias(c.cfg.cell.varactor.v_min, c.cfg.cell.varactor.v_max);
            double worst = 0.0;
            for (int i = 0; i < c.opt.energy_samples; ++i)
            {
                CellConfig cell = c.cfg.cell;
                cell.insertion_loss_db = 0.0;
                cell.magnetic.R *= scale(rng);
                cell.electric.R *= scale(rng);
                const double f = freq(rng), um = bias(rng), ue = bias(rng);
                const ScatterCoefficient s = cell_response(cell, f, um, ue);
                worst = std::max(worst, std::abs(std::norm(s.t_coef) + std::norm(s.gamma_coef) - 1.0));
            }
            r.pass = worst < kEnergyTol;
            r.detail = std::to_string(c.opt.energy_samples) + " cells, worst ||T|^2+|G|^2-1| = " + fmt("%.2e", worst);
            return r;
        }

        CriterionResult coverage(const Context &c)
        {
            CriterionResult r;
            r.pass = true;
            const std::size_t bins = std::size_t(std::lround(360.0 / c.cfg.lut.phase_step));
            std::ostringstream d;
            for (Mode m : {Mode::Lens, Mode::Mirror})
            {
                const PhaseLookupTable again = build_config_lut(c.cfg, m);
                const PhaseLookupTable &a = c.lut(m);
                bool same = a.entries.size() == again.entries.size();
                for (std::size_t i = 0; same && i < a.entries.size(); ++i)
                {
                    const LutEntry &x = a.entries[i], &y = again.entries[i];
                    same = x.control.dac_code_m == y.control.dac_code_m &&
                           x.control.dac_code_e == y.control.dac_code_e && x.achieved.t_coef == y.achieved.t_coef &&
                           x.achieved.gamma_coef == y.achieved.gamma_coef && x.flagged == y.flagged;
                }
                const bool ok = a.entries.size() == bins && a.flagged_count() == 0 && same;
                r.pass = r.pass && ok;
                d << mode_name(m) << ": " << a.entries.size() << "/" << bins << " bins, " << a.flagged_count()
                  << " flagged, rerun " << (same ? "identical" : "DIFFERS") << "; ";
            }
            r.detail = d.str();
            return r;
        }

        CriterionResult steering(const Context &c)
        {
            CriterionResult r;
            const auto grid = default_angle_grid(0.5);
            double worst = 0.0;
            int n = 0;
            for (Mode m : {Mode::Lens, Mode::Mirror})
                for (int a = -60; a <= 60; a += 5)
                {
                    const BeamCommand cmd = steering_command(c.cfg.array, c.lut(m), a, 0.0);
                    const auto pat = radiation_pattern(c.cfg.array, cmd, 0.0, grid, c.cfg.element_q);
                    const auto pk = peak_detect(pat, 1);
                    worst = std::max(worst, pk.empty() ? 180.0 : std::abs(pk[0].angle_deg - a));
                    ++n;
                }
            r.pass = worst <= kSteerTolDeg;
            r.detail = std::to_string(n) + " commands, worst peak error " + fmt("%.2f deg", worst);
            return r;
        }

        CriterionResult splits(const Context &c)
        {
            CriterionResult r;
            r.pass = true;
            const auto grid = default_angle_grid(0.5);
            double worst_err = 0.0, worst_level = 0.0;
            const double pairs[3][2] = {{-45.0, 15.0}, {-30.0, 30.0}, {-15.0, 45.0}};
            for (Mode m : {Mode::Lens, Mode::Mirror})
                for (const auto &p : pairs)
                {
                    const BeamCommand cmd =
                        multibeam_command(c.cfg.array, c.lut(m), {BeamArm{p[0], 1.0}, BeamArm{p[1], 1.0}}, 0.0);
                    const auto pks = peak_detect(radiation_pattern(c.cfg.array, cmd, 0.0, grid, c.cfg.element_q), 2);
                    if (pks.size() < 2)
                    {
                        r.pass = false;
                        continue;
                    }
                    for (double target : p)
                    {
                        double best = 180.0;
                        for (const Peak &k : pks)
                            best = std::min(best, std::abs(k.angle_deg - target));
                        worst_err = std::max(worst_err, best);
                    }
                    worst_level = std::max(worst_level, std::abs(pks[0].power_db - pks[1].power_db));
                }
            r.pass = r.pass && worst_err <= kSteerTolDeg && worst_level <= kSplitLevelDb;
            r.detail = "worst peak error " + fmt("%.2f deg", worst_err) + ", worst arm imbalance " +
                       fmt("%.3f dB", worst_level);
            return r;
        }

        CriterionResult scaling(const Context &c)
        {
            CriterionResult r;
            SurfaceArray small = c.cfg.array, big = c.cfg.array;
            big.n_cols *= 2;
            big.m_rows *= 2;
            const double d = 200.0;
            auto power = [&](const SurfaceArray &a) {
                const std::vector<cplx> ones(std::size_t(a.n_cols) * a.m_rows, cplx{1.0, 0.0});
                return received_power_farfield_dbm(c.cfg.radio, d, d, 0.0, 0.0, a, ones, c.cfg.element_q);
            };
            const double delta = power(big) - power(small);
            r.pass = std::abs(delta - kScalingDb) <= kScalingTolDb;
            r.detail = "2N x 2M changes power by " + fmt("%+.3f dB", delta) + " (expected +12.04 +- 0.2)";
            return r;
        }

        CriterionResult capacity(const Context &c)
        {
            CriterionResult r;
            r.pass = true;
            const double lam = c.cfg.array.lambda();
            double worst_gap = 0.0, worst_excess = -1e9;
            for (int cm = 10; cm <= 50; cm += 10)
            {
                SurfaceArray a = c.cfg.array;
                a.n_cols = std::max(1, int(std::lround(cm * 0.01 / a.col_spacing)));
                a.m_rows = std::max(1, int(std::lround(cm * 0.01 / a.row_spacing)));
                const BeamCommand cmd = steering_command(a, c.lut(c.cfg.beam.mode), 0.0, 0.0);
                const double g = surface_gain_dbi(a, replicate_columns(cmd.coefficients, a.m_rows), 0.0, 0.0, lam,
                                                  c.cfg.element_q);
                const double cap = aperture_capacity_dbi(a.n_cols * a.col_spacing * a.m_rows * a.row_spacing, lam);
                worst_gap = std::max(worst_gap, cap - g);
                worst_excess = std::max(worst_excess, g - cap);
            }
            r.pass = worst_excess <= 1e-9 && worst_gap <= kCapacityGapDb;
            r.detail = "10..50 cm squares, gain below capacity by at most " + fmt("%.2f dB", worst_gap) +
                       ", max excess " + fmt("%.2e dB", std::max(0.0, worst_excess));
            return r;
        }

        CriterionResult reciprocity(const Context &c)
        {
            CriterionResult r;
            std::mt19937_64 rng(c.opt.seed + 7);
            std::uniform_real_distribution<double> dist(2.0, 50.0), ang(-70.0, 70.0);
            double worst = 0.0;
            for (int i = 0; i < 200; ++i)
            {
                const double di = dist(rng), ds = dist(rng), ti = ang(rng), ts = ang(rng);
                const BeamCommand cmd = steering_command(c.cfg.array, c.lens, ts, ti);
                const auto coefs = replicate_columns(cmd.coefficients, c.cfg.array.m_rows);
                const double a =
                    received_power_farfield_dbm(c.cfg.radio, di, ds, ti, ts, c.cfg.array, coefs, c.cfg.element_q);
                const double b =
                    received_power_farfield_dbm(c.cfg.radio, ds, di, ts, ti, c.cfg.array, coefs, c.cfg.element_q);
                worst = std::max(worst, std::abs(std::pow(10.0, (a - b) / 10.0) - 1.0));
            }
            const ProtocolChannel ch(channel_params(c.cfg), c.lens, c.mirror);
            BeamSession s(ch, protocol_options(c.cfg), c.opt.seed);
            const AlignmentResult down = s.refine(s.cold_start(8, 8, 8), c.cfg.protocol.refine_levels);
            const AlignmentResult up = s.uplink_from_downlink(down);
            const bool uplink_ok = up.probes_used == 0 && up.snr_db == down.snr_db;
            r.pass = worst <= kReciprocityRel && uplink_ok;
            r.detail = "200 swaps, worst relative change " + fmt("%.1e", worst) + "; uplink " +
                       std::to_string(up.probes_used) + " probes, SNR " + fmt("%.6f", up.snr_db) + " vs downlink " +
                       fmt("%.6f dB", down.snr_db);
            return r;
        }

        // Exact sum against the far-field form over a grid of incidence/steering pairs.
        CriterionResult farfield(const Context &c)
        {
            CriterionResult r;
            const SurfaceArray &a = c.cfg.array;
            const SurfacePose pose{};
            const double size = aperture_size(a);
            const double factors[] = {5.0, 10.0, 20.0, 40.0};
            int cases = 0, monotone = 0, tail_monotone = 0;
            double worst20 = 0.0;
            std::string first_bad;
            for (int ti = -30; ti <= 30; ti += 15)
                for (int ts = -60; ts <= 60; ts += 15)
                {
                    const BeamCommand cmd = steering_command(a, c.lut(c.cfg.beam.mode), ts, ti);
                    const auto coefs = replicate_columns(cmd.coefficients, a.m_rows);
                    double diffs[4];
                    for (int k = 0; k < 4; ++k)
                    {
                        const double dist = factors[k] * size;
                        auto at = [&](double deg) {
                            return dist *
                                   (std::cos(deg2rad(deg)) * pose.normal() + std::sin(deg2rad(deg)) * pose.tangent());
                        };
                        const LinkGeometry g{at(ti), at(ts), pose};
                        const double exact = received_power_exact_dbm(c.cfg.radio, g, a, coefs, c.cfg.element_q);
                        const double ff =
                            received_power_farfield_dbm(c.cfg.radio, dist, dist, ti, ts, a, coefs, c.cfg.element_q);
                        diffs[k] = std::abs(exact - ff);
                    }
                    ++cases;
                    worst20 = std::max(worst20, diffs[2]);
                    const bool tail = diffs[2] < diffs[1] && diffs[3] < diffs[2];
                    tail_monotone += tail;
                    if (tail && diffs[1] < diffs[0])
                        ++monotone;
                    else if (first_bad.empty())
                    {
                        std::ostringstream d;
                        d << "; first non-monotone " << ti << "->" << ts << " deg: " << fmt("%.4f", diffs[0]) << "/"
                          << fmt("%.4f", diffs[1]) << "/" << fmt("%.4f", diffs[2]) << "/" << fmt("%.4f dB", diffs[3]);
                        first_bad = d.str();
                    }
                }
            r.pass = worst20 <= kFarFieldDb && monotone == cases;
            r.detail = "worst |diff| at 20x " + fmt("%.4f dB", worst20) + "; monotone 5/10/20/40x in " +
                       std::to_string(monotone) + "/" + std::to_string(cases) + " geometries, 10/20/40x in " +
                       std::to_string(tail_monotone) + "/" + std::to_string(cases) + first_bad;
            return r;
        }

        CriterionResult protocol(const Context &c)
        {
            CriterionResult r;
            const ProtocolOptions po = protocol_options(c.cfg);
            const int levels = c.cfg.protocol.refine_levels;
            bool counts = true;
            {
                const ProtocolChannel ch(channel_params(c.cfg), c.lens, c.mirror);
                BeamSession s(ch, po, c.opt.seed);
                const int n = 8;
                const AlignmentResult cold = s.cold_start(n, n, n);
                const AlignmentResult steady = s.steady_state(cold.enodeb_deg, n, n);
                const AlignmentResult ma = s.multiarm(64, ch.params().truth_enodeb_deg, ch.params().truth_ue_deg, 0);
                const std::uint64_t refine_cost = std::uint64_t(levels) * std::uint64_t(po.refine_beams);
                const AlignmentResult ma_ref =
                    s.multiarm(64, ch.params().truth_enodeb_deg, ch.params().truth_ue_deg, levels);
                counts = cold.probes_used == std::uint64_t(n * n * n) && steady.probes_used == std::uint64_t(n * n) &&
                         ma.probes_used <= 12 && ma_ref.probes_used <= 12 + refine_cost;
            }
            std::mt19937_64 rng(c.opt.seed + 11);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            int cold_ok = 0, multi_ok = 0;
            for (int t = 0; t < c.opt.protocol_trials; ++t)
            {
                ChannelParams p = channel_params(c.cfg);
                p.geometry_mode = t % 2 ? Mode::Mirror : Mode::Lens;
                p.truth_enodeb_deg = 50.0 * u(rng);
                p.truth_incident_deg = 40.0 * u(rng);
                p.truth_surface_deg = 55.0 * u(rng);
                p.truth_ue_deg = 50.0 * u(rng);
                const ProtocolChannel ch(p, c.lens, c.mirror);
                ProtocolOptions o = po;
                o.noise_sigma_db = 0.0;
                o.tolerance_deg = kProtocolTolDeg;
                BeamSession s(ch, o, c.opt.seed + std::uint64_t(t));
                const AlignmentResult coarse = s.cold_start(8, 8, 8);
                cold_ok += coarse.detected && s.refine(coarse, levels).success;
                multi_ok += s.multiarm(64, p.truth_enodeb_deg, p.truth_ue_deg, levels).success;
            }
            const int n = c.opt.protocol_trials;
            r.pass = counts && cold_ok == n && multi_ok == n;
            r.detail = std::string("counts ") + (counts ? "exact" : "WRONG") + "; cold start+refine " +
                       std::to_string(cold_ok) + "/" + std::to_string(n) + ", multi-arm " + std::to_string(multi_ok) +
                       "/" + std::to_string(n) + " within 3 deg";
            return r;
        }

        CriterionResult scenario(const Context &c)
        {
            CriterionResult r;
            r.pass = true;
            std::ostringstream d;
            for (const char *name : {"indoor", "outdoor"})
            {
                const Scenario sc =
                    scenario_from_json(builtin_scenario_json(name), c.cfg.array, c.cfg.radio, c.cfg.element_q);
                const ScenarioEngine eng(sc, c.lens, c.mirror);
                std::vector<double> beta = c.cfg.scenario.beta_grid;
                std::sort(beta.begin(), beta.end());
                const BlockageResult b = blockage_failure_rate(eng, beta, c.opt.scenario_trials, c.opt.seed);
                bool monotone = true, dominated = true;
                for (const BlockageCurve &cv : b.curves)
                    for (std::size_t i = 1; i < cv.failure.size(); ++i)
                        monotone = monotone && cv.failure[i] >= cv.failure[i - 1];
                for (std::size_t k = 1; k < b.curves.size(); ++k)
                    for (std::size_t i = 0; i < beta.size(); ++i)
                        dominated = dominated && b.curves[k].failure[i] <= b.curves[0].failure[i];
                const double sheet = coverage_fraction(eng, Deployment{0, true}, sc.coverage_snr_db);
                const double surf = coverage_fraction(eng, Deployment{1, false}, sc.coverage_snr_db);
                const bool sheet_ok = sheet < surf;
                r.pass = r.pass && monotone && dominated && sheet_ok;
                d << name << ": monotone " << (monotone ? "yes" : "NO") << ", surface<=none "
                  << (dominated ? "yes" : "NO") << ", coverage sheet " << fmt("%.3f", sheet) << " < surface "
                  << fmt("%.3f", surf) << "; ";
            }
            d << c.opt.scenario_trials << " trials";
            r.detail = d.str();
            return r;
        }

        CriterionResult bandwidth(const Context &c)
        {
            CriterionResult r;
            const double f0 = c.cfg.lut.center_freq, w = c.cfg.lut.bandwidth_window;
            const auto freqs = uniform_grid(f0 - w, f0 + w, w / 10.0);
            double worst = 0.0;
            for (Mode m : {Mode::Lens, Mode::Mirror})
            {
                const BandwidthProfile p = bandwidth_profile(c.lut(m), c.cfg.cell, freqs, w);
                for (double v : p.max_phase_dev_deg)
                    worst = std::max(worst, v);
            }
            r.pass = worst <= kBandwidthDeg;
            r.detail = "worst entry phase deviation over +-" + fmt("%.0f MHz", w / 1e6) + ": " + fmt("%.3f deg", worst);
            return r;
        }

        CriterionResult goldens(const Context &)
        {
            CriterionResult r;
            const Config d = default_config();
            const double cv = varactor_capacitance(d.cell.varactor, d.design_bias);
            const CircuitParams mag = magnetic_circuit(d.cell.magnetic, cv);
            const CircuitParams ele = electric_circuit(d.cell.electric, cv);
            SurfaceArray a;
            a.col_spacing = 2.6e-3;
            a.center_freq = 24.5e9;
            const double inc = column_phase_deg(a, 1, 30.0) - column_phase_deg(a, 0, 30.0);
            const double cap = aperture_capacity_dbi(0.10 * 0.20, wavelength(24.5e9));
            RadioParams unit;
            unit.p_t_dbm = 0.0;
            unit.g_t_dbi = 0.0;
            unit.g_r_dbi = 0.0;
            unit.freq = 24.5e9;
            const double friis = friis_dbm(unit, 1.0);
            const std::pair<double, double> checks[] = {
                {mag.L, golden::kLm},          {mag.C, golden::kCm},       {ele.L, golden::kLe},
                {ele.C, golden::kCe},          {inc, golden::kColumnIncrement},
                {cap, golden::kCapacity10x20}, {friis, golden::kFriis1m}};
            double worst = 0.0;
            for (const auto &[got, want] : checks)
                worst = std::max(worst, std::abs(got - want) / std::abs(want));
            r.pass = worst <= kGoldenRel;
            r.detail = "7 values, worst relative deviation " + fmt("%.1e", worst) + " (increment " +
                       fmt("%.2f deg", inc) + ", capacity " + fmt("%.2f dBi", cap) + ", Friis " +
                       fmt("%.2f dB", friis) + ")";
            return r;
        }
    }

    std::vector<CriterionResult> run_acceptance(const Config &config, const AcceptanceOptions &options)
    {
        Context ctx{config, options, build_config_lut(config, Mode::Lens), build_config_lut(config, Mode::Mirror)};
        struct Item
        {
            const char *name;
            std::function<CriterionResult(const Context &)> fn;
            double budget_s; // 0 = no runtime bound
        };
        const Item items[] = {{"energy conservation", energy, kEnergySeconds},
                              {"huygens coverage", coverage, 0.0},
                              {"steering accuracy", steering, kSteerSeconds},
                              {"multi-beam splits", splits, 0.0},
                              {"path-loss scaling", scaling, 0.0},
                              {"capacity bound", capacity, 0.0},
                              {"reciprocity", reciprocity, 0.0},
                              {"exact/far-field agreement", farfield, 0.0},
                              {"protocol counts", protocol, 0.0},
                              {"scenario properties", scenario, kScenarioSeconds},
                              {"bandwidth", bandwidth, 0.0},
                              {"golden values", goldens, 0.0}};
        std::vector<CriterionResult> out;
        int id = 0;
        for (const Item &it : items)
        {
            const auto t0 = std::chrono::steady_clock::now();
            CriterionResult r;
            try
            {
                r = it.fn(ctx);
            }
            catch (const std::exception &e)
            {
                r.pass = false;
                r.detail = std::string("error: ") + e.what();
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            r.id = ++id;
            r.name = it.name;
            if (it.budget_s > 0.0 && r.seconds >= it.budget_s)
            {
                r.pass = false;
                r.detail += "; over the " + fmt("%.0f s", it.budget_s) + " budget";
            }
            out.push_back(r);
        }
        return out;
    }

    std::string format_result(const CriterionResult &r)
    {
        char head[96];
        std::snprintf(head, sizeof head, "%s [%2d] %-26s (%6.2f s) ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                      r.seconds);
        return head + r.detail;
    }
}
