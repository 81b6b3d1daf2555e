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

#include "hms/cli.hpp"
#include "hms/acceptance.hpp"
#include "hms/config.hpp"
#include "hms/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>

namespace hms
{
    namespace
    {
        using nlohmann::json;

        // HMS_LOG=0 silences progress, 2 adds detail. Default 1.
        int log_level()
        {
            const char *v = std::getenv("HMS_LOG");
            return v ? std::atoi(v) : 1;
        }

        void log(int level, const std::string &msg)
        {
            if (log_level() >= level)
                std::cerr << "hmsrelay: " << msg << "\n";
        }

        struct RunConfig
        {
            std::string subcommand;
            std::string config_path;
            std::string out_dir = "out";
            std::uint64_t seed = 0;
            std::vector<std::string> overrides;
        };

        struct Loaded
        {
            Config cfg;
            OutputMeta meta;
        };

        Loaded load(const RunConfig &rc)
        {
            json doc = rc.config_path.empty() ? default_config_json() : load_config_json(rc.config_path);
            for (const auto &o : rc.overrides)
                apply_override(doc, o);
            Loaded l{parse_config(doc), OutputMeta{config_hash(doc), tool_version()}};
            log(2, "config hash " + l.meta.config_hash);
            return l;
        }

        std::string out_path(const RunConfig &rc, const std::string &name) { return rc.out_dir + "/" + name; }

        void write(const std::string &path, const std::string &content)
        {
            atomic_write(path, content);
            log(1, "wrote " + path);
        }

        json stamp(const OutputMeta &m)
        {
            return json{{"tool_version", m.tool_version}, {"config_hash", m.config_hash}};
        }

        json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

        json result_json(const AlignmentResult &r)
        {
            return json{{"procedure", r.procedure},     {"enodeb_deg", r.enodeb_deg},
                        {"surface_deg", r.surface_deg}, {"ue_deg", r.ue_deg},
                        {"probes_used", r.probes_used}, {"snr_db", r.snr_db},
                        {"probe_snr_db", r.probe_snr_db}, {"oracle_snr_db", r.oracle_snr_db},
                        {"detected", r.detected},       {"success", r.success},
                        {"reverted", r.reverted},       {"fallback", r.fallback}};
        }

        int cmd_pattern(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            const PatternSettings &p = l.cfg.pattern;
            std::vector<double> freqs;
            for (int i = 0; i < p.freq_points; ++i)
                freqs.push_back(p.freq_points == 1 ? p.freq_start
                                                   : p.freq_start + (p.freq_stop - p.freq_start) * i /
                                                                        double(p.freq_points - 1));
            const auto &v = l.cfg.cell.varactor;
            const auto grid = uniform_grid(v.v_min, v.v_max, p.voltage_step);
            const HuygensPattern pat = sweep_pattern(l.cfg.cell, freqs, grid, grid);
            write(out_path(rc, "pattern.csv"), pattern_csv(pat, l.meta));
            return 0;
        }

        int cmd_lut(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            for (Mode m : {Mode::Lens, Mode::Mirror})
            {
                const PhaseLookupTable lut = build_config_lut(l.cfg, m);
                if (lut.flagged_count() > 0)
                    log(1, std::to_string(lut.flagged_count()) + " " + mode_name(m) + " bins filled from neighbours");
                write(out_path(rc, std::string("lut_") + mode_name(m) + ".json"),
                      lut_to_json(lut, l.cfg.lut.dac, l.meta).dump(2) + "\n");
            }
            return 0;
        }

        int cmd_beam(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            const BeamSettings &b = l.cfg.beam;
            const PhaseLookupTable lut = build_config_lut(l.cfg, b.mode);
            const BeamCommand cmd = b.arms.size() == 1
                                        ? steering_command(l.cfg.array, lut, b.arms[0].angle_deg, b.incident_deg)
                                        : multibeam_command(l.cfg.array, lut, b.arms, b.incident_deg);
            const RadiationPattern pat =
                radiation_pattern(l.cfg.array, cmd, b.incident_deg, default_angle_grid(b.grid_step_deg), l.cfg.element_q);
            json j = stamp(l.meta);
            j["mode"] = mode_name(cmd.mode);
            j["incident_deg"] = cmd.incident_deg;
            j["amplitude_residual_rms"] = cmd.amplitude_residual_rms;
            json cols = json::array();
            for (std::size_t n = 0; n < cmd.coefficients.size(); ++n)
                cols.push_back({{"column", n},
                                {"phase_deg", cmd.per_column_phase[n]},
                                {"dac_m", cmd.controls[n].dac_code_m},
                                {"dac_e", cmd.controls[n].dac_code_e},
                                {"coefficient", cjson(cmd.coefficients[n])}});
            j["columns"] = cols;
            json peaks = json::array();
            for (const Peak &p : peak_detect(pat, std::size_t(std::max(1, b.peaks))))
                peaks.push_back({{"angle_deg", p.angle_deg}, {"power_db", p.power_db}});
            j["peaks"] = peaks;
            write(out_path(rc, "beam.json"), j.dump(2) + "\n");
            write(out_path(rc, "beam_pattern.csv"), radiation_csv(pat, l.meta));
            return 0;
        }

        int cmd_budget(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            const BudgetSettings &b = l.cfg.budget;
            const SurfacePose &pose = b.surface;
            const int st = pose.side(b.tx), sr = pose.side(b.rx);
            if (st == 0 || sr == 0)
                throw std::domain_error("transmitter and receiver must lie off the surface plane");
            const Mode mode = st == sr ? Mode::Mirror : Mode::Lens;
            const double ti = pose.signed_angle(b.tx), ts = pose.signed_angle(b.rx);
            const double di = norm(b.tx - pose.center), ds = norm(b.rx - pose.center);
            const PhaseLookupTable lut = build_config_lut(l.cfg, mode);
            const BeamCommand cmd = steering_command(l.cfg.array, lut, ts, ti);
            const auto coefs = replicate_columns(cmd.coefficients, l.cfg.array.m_rows);
            const double exact =
                received_power_exact_dbm(l.cfg.radio, LinkGeometry{b.tx, b.rx, pose}, l.cfg.array, coefs, l.cfg.element_q);
            const double ff = received_power_farfield_dbm(l.cfg.radio, di, ds, ti, ts, l.cfg.array, coefs, l.cfg.element_q);
            if (!farfield_distance_ok(l.cfg.array, di, ds))
                log(1, "endpoints closer than ten apertures; far-field figure is approximate");
            const SurfaceArray &a = l.cfg.array;
            json j = stamp(l.meta);
            j["mode"] = mode_name(mode);
            j["d_i_m"] = di;
            j["d_s_m"] = ds;
            j["theta_i_deg"] = ti;
            j["theta_s_deg"] = ts;
            j["eirp_dbm"] = l.cfg.radio.eirp_dbm();
            j["direct_friis_dbm"] = friis_dbm(l.cfg.radio, norm(b.rx - b.tx));
            j["received_exact_dbm"] = exact;
            j["received_farfield_dbm"] = ff;
            j["snr_exact_db"] = exact - l.cfg.radio.noise_floor_dbm;
            j["path_loss_db"] = surface_path_loss_db(di, ds, ti, ts, a, coefs, l.cfg.element_q);
            j["surface_gain_dbi"] = surface_gain_dbi(a, coefs, ti, ts, a.lambda(), l.cfg.element_q);
            j["aperture_capacity_dbi"] = aperture_capacity_dbi(a.n_cols * a.col_spacing * a.m_rows * a.row_spacing, a.lambda());
            j["farfield_ok"] = farfield_distance_ok(a, di, ds);
            write(out_path(rc, "budget.json"), j.dump(2) + "\n");
            return 0;
        }

        int cmd_scenario(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            const Scenario sc = config_scenario(l.cfg);
            const ScenarioEngine eng(sc, build_config_lut(l.cfg, Mode::Lens), build_config_lut(l.cfg, Mode::Mirror));
            struct Named
            {
                std::string name;
                Deployment d;
            };
            std::vector<Named> deps{{"none", Deployment{0, false}}};
            for (std::size_t k = 1; k <= sc.surfaces.size(); ++k)
                deps.push_back({"surfaces_" + std::to_string(k), Deployment{int(k), false}});
            if (!sc.metal_sheets.empty())
                deps.push_back({"metal_sheet", Deployment{0, true}});

            CsvTable cov({"deployment", "tx", "rx_x_m", "rx_y_m", "snr_db", "tier", "path"}, l.meta);
            json j = stamp(l.meta);
            j["scenario"] = sc.name;
            json fr = json::object();
            for (const Named &n : deps)
            {
                for (std::size_t t = 0; t < sc.tx.size(); ++t)
                    for (const CoverageEntry &e : coverage_map(eng, t, n.d))
                        cov.row(std::vector<std::string>{n.name, sc.tx[t].name, format_number(e.rx.x),
                                                         format_number(e.rx.y), format_number(e.snr_db), e.tier,
                                                         e.path_kind});
                fr[n.name] = coverage_fraction(eng, n.d, sc.coverage_snr_db);
            }
            j["coverage_threshold_db"] = sc.coverage_snr_db;
            j["coverage_fraction"] = fr;

            log(1, "blockage Monte Carlo, " + std::to_string(l.cfg.scenario.trials) + " trials");
            const BlockageResult br = blockage_failure_rate(eng, l.cfg.scenario.beta_grid, l.cfg.scenario.trials, rc.seed);
            CsvTable blk({"surfaces", "beta", "failure", "ci_low", "ci_high"}, l.meta);
            for (const BlockageCurve &c : br.curves)
                for (std::size_t i = 0; i < br.beta.size(); ++i)
                    blk.row({double(c.surfaces), br.beta[i], c.failure[i], c.ci_low[i], c.ci_high[i]});
            j["blockage"] = {{"trials", br.trials}, {"seed", br.seed}};
            write(out_path(rc, "coverage.csv"), cov.str());
            write(out_path(rc, "blockage.csv"), blk.str());
            write(out_path(rc, "scenario.json"), j.dump(2) + "\n");
            return 0;
        }

        int cmd_protocol(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            const ProtocolSettings &p = l.cfg.protocol;
            const PhaseLookupTable lens = build_config_lut(l.cfg, Mode::Lens);
            const PhaseLookupTable mirror = build_config_lut(l.cfg, Mode::Mirror);
            const ProtocolChannel ch(channel_params(l.cfg), lens, mirror);
            const ProtocolOptions opt = protocol_options(l.cfg);

            BeamSession s(ch, opt, rc.seed);
            const AlignmentResult coarse = s.cold_start(p.n_enodeb, p.n_surface, p.n_ue);
            const AlignmentResult fine = s.refine(coarse, p.refine_levels);
            const AlignmentResult up = s.uplink_from_downlink(fine);
            const AlignmentResult steady = s.steady_state(fine.enodeb_deg, p.n_surface, p.n_ue);
            const AlignmentResult multi = s.multiarm(p.n_multiarm, fine.enodeb_deg, fine.ue_deg, p.refine_levels);

            json trace = stamp(l.meta);
            json probes = json::array();
            for (const ProbeRecord &r : s.probes())
                probes.push_back({{"index", r.index},
                                  {"stage", r.stage},
                                  {"enodeb_deg", r.enodeb_deg},
                                  {"surface_deg", r.surface_deg},
                                  {"ue_deg", r.ue_deg},
                                  {"snr_db", r.snr_db}});
            json msgs = json::array();
            for (const ControlMessage &m : s.messages())
            {
                json arms = json::array();
                for (const BeamSpec &a : m.beam.arms)
                    arms.push_back({{"angle_deg", a.angle_deg}, {"width_deg", a.width_deg}});
                msgs.push_back({{"seq", m.seq},
                                {"from", role_name(m.from)},
                                {"to", role_name(m.to)},
                                {"kind", m.kind},
                                {"mode", mode_name(m.mode)},
                                {"arms", arms}});
            }
            trace["probes"] = probes;
            trace["messages"] = msgs;

            json sum = stamp(l.meta);
            sum["seed"] = rc.seed;
            sum["truth"] = {{"enodeb_deg", p.truth_enodeb_deg},
                            {"incident_deg", p.truth_incident_deg},
                            {"surface_deg", p.truth_surface_deg},
                            {"ue_deg", p.truth_ue_deg}};
            sum["results"] = json::array({result_json(coarse), result_json(fine), result_json(up),
                                          result_json(steady), result_json(multi)});

            // Seeded random-truth trials for success statistics.
            if (p.trials > 0)
            {
                std::mt19937_64 rng(rc.seed);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                int cold_ok = 0, multi_ok = 0;
                std::uint64_t cold_probes = 0, multi_probes = 0;
                for (int t = 0; t < p.trials; ++t)
                {
                    ChannelParams cp = channel_params(l.cfg);
                    cp.truth_enodeb_deg = 50.0 * u(rng);
                    cp.truth_incident_deg = 40.0 * u(rng);
                    cp.truth_surface_deg = 55.0 * u(rng);
                    cp.truth_ue_deg = 50.0 * u(rng);
                    const ProtocolChannel tc(cp, lens, mirror);
                    BeamSession ts(tc, opt, rc.seed + std::uint64_t(t) + 1);
                    const AlignmentResult r = ts.refine(ts.cold_start(p.n_enodeb, p.n_surface, p.n_ue), p.refine_levels);
                    const AlignmentResult m = ts.multiarm(p.n_multiarm, cp.truth_enodeb_deg, cp.truth_ue_deg, p.refine_levels);
                    cold_ok += r.success;
                    multi_ok += m.success;
                    cold_probes += r.probes_used;
                    multi_probes += m.probes_used;
                }
                sum["trials"] = {{"count", p.trials},
                                 {"cold_start_refine_success", cold_ok},
                                 {"multiarm_success", multi_ok},
                                 {"cold_start_refine_mean_probes", double(cold_probes) / p.trials},
                                 {"multiarm_mean_probes", double(multi_probes) / p.trials}};
            }
            write(out_path(rc, "protocol_trace.json"), trace.dump(2) + "\n");
            write(out_path(rc, "protocol_summary.json"), sum.dump(2) + "\n");
            std::printf("cold start + refine %llu probes, SNR %.2f dB (oracle %.2f dB), %s\n",
                        (unsigned long long)fine.probes_used, fine.snr_db, fine.oracle_snr_db,
                        fine.success ? "aligned" : "not aligned");
            return 0;
        }

        int cmd_selftest(const RunConfig &rc)
        {
            const Loaded l = load(rc);
            AcceptanceOptions opt;
            opt.seed = rc.seed;
            bool ok = true;
            for (const CriterionResult &r : run_acceptance(l.cfg, opt))
            {
                std::puts(format_result(r).c_str());
                ok = ok && r.pass;
            }
            return ok ? 0 : 1;
        }
    }

    int run(int argc, char **argv)
    {
        CLI::App app{"hmsrelay: reconfigurable Huygens metasurface relay simulator", "hmsrelay"};
        app.set_version_flag("--version", tool_version());
        RunConfig rc;
        app.add_option("--config", rc.config_path, "JSON config merged over the defaults");
        app.add_option("--out", rc.out_dir, "output directory")->capture_default_str();
        app.add_option("--seed", rc.seed, "random seed")->capture_default_str();
        app.add_option("--set", rc.overrides, "override a config key, e.g. --set protocol.n_ue=16")
            ->type_name("KEY=VALUE")
            ->take_all();
        app.require_subcommand(1, 1);
        const std::pair<const char *, const char *> subs[] = {
            {"pattern", "sweep the unit-cell response over frequency and bias (CSV)"},
            {"lut", "build the lens and mirror phase lookup tables (JSON)"},
            {"beam", "synthesise a beam command and its radiation pattern"},
            {"budget", "link budget through the surface for the configured geometry"},
            {"scenario", "coverage maps and blockage Monte Carlo on a floor plan"},
            {"protocol", "beam alignment procedures with a probe trace"},
            {"selftest", "run the acceptance suite"}};
        for (const auto &[name, help] : subs)
            app.add_subcommand(name, help)->fallthrough()->callback([&rc, n = std::string(name)] { rc.subcommand = n; });

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::Success &e)
        {
            return app.exit(e);
        }
        catch (const CLI::ParseError &e)
        {
            std::cerr << "hmsrelay: " << e.what() << "\n\n" << app.help();
            return 2;
        }

        try
        {
            if (rc.subcommand == "pattern")
                return cmd_pattern(rc);
            if (rc.subcommand == "lut")
                return cmd_lut(rc);
            if (rc.subcommand == "beam")
                return cmd_beam(rc);
            if (rc.subcommand == "budget")
                return cmd_budget(rc);
            if (rc.subcommand == "scenario")
                return cmd_scenario(rc);
            if (rc.subcommand == "protocol")
                return cmd_protocol(rc);
            return cmd_selftest(rc);
        }
        catch (const config_error &e)
        {
            std::cerr << "hmsrelay: config error: " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception &e)
        {
            std::cerr << "hmsrelay: error: " << e.what() << "\n";
            return 1;
        }
    }
}
