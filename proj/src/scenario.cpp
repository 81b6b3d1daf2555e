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

#include "hms/scenario.hpp"
#include "hms/embedded_config.hpp"

#include <algorithm>
#include <random>

namespace hms
{
    using nlohmann::json;

    namespace
    {
        double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
        Point2 sub(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
        Point2 add(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
        Point2 scale(double s, Point2 a) { return {s * a.x, s * a.y}; }
        double dot2(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
        double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
        Vec3 lift(Point2 p) { return {p.x, p.y, 0.0}; }

        // Proper crossing of path p->q with segment a->b. Path endpoints touching the segment do not count.
        bool crosses(Point2 p, Point2 q, Point2 a, Point2 b)
        {
            const Point2 r = sub(q, p);
            const Point2 s = sub(b, a);
            const double den = cross(r, s);
            if (std::abs(den) < 1e-15)
                return false;
            const Point2 ap = sub(a, p);
            const double t = cross(ap, s) / den;
            const double u = cross(ap, r) / den;
            return t > 1e-9 && t < 1.0 - 1e-9 && u >= 0.0 && u < 1.0;
        }

        // Mirror image of p across the line through a with unit normal n.
        Point2 image(Point2 p, Point2 a, Point2 n) { return sub(p, scale(2.0 * dot2(sub(p, a), n), n)); }

        // Angle (deg) between v and the line normal n, in [0, 90].
        double normal_angle(Point2 v, Point2 n)
        {
            return rad2deg(std::acos(std::min(1.0, std::abs(dot2(v, n)) / std::hypot(v.x, v.y))));
        }

        Point2 yaw_normal(double yaw_deg) { return {std::cos(deg2rad(yaw_deg)), std::sin(deg2rad(yaw_deg))}; }
        Point2 yaw_tangent(double yaw_deg) { return {-std::sin(deg2rad(yaw_deg)), std::cos(deg2rad(yaw_deg))}; }

        struct Specular
        {
            bool valid = false;
            Point2 point;
            double along = 0.0; // signed position of the point along the tangent from the anchor
        };

        // Single-bounce specular point on the infinite line (anchor a, tangent u).
        Specular specular_point(Point2 tx, Point2 rx, Point2 a, Point2 u)
        {
            const Point2 n{-u.y, u.x};
            const double st = dot2(sub(tx, a), n);
            const double sr = dot2(sub(rx, a), n);
            Specular out;
            if (st == 0.0 || sr == 0.0 || (st > 0.0) != (sr > 0.0))
                return out;
            const Point2 ti = image(tx, a, n);
            // Intersect ti->rx with the line: solve for the parameter where the normal offset vanishes.
            const double ei = dot2(sub(ti, a), n);
            const double t = ei / (ei - sr);
            out.point = add(ti, scale(t, sub(rx, ti)));
            out.along = dot2(sub(out.point, a), u);
            out.valid = true;
            return out;
        }

        Point2 point2(const json &j, const std::string &key)
        {
            if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
                throw config_error("scenario: '" + key + "' must be [x, y]");
            return {j.at(key)[0].get<double>(), j.at(key)[1].get<double>()};
        }

        double number_or(const json &j, const std::string &key, double dflt)
        {
            if (!j.contains(key))
                return dflt;
            if (!j.at(key).is_number())
                throw config_error("scenario: '" + key + "' must be a number");
            return j.at(key).get<double>();
        }

        std::string string_or(const json &j, const std::string &key, const std::string &dflt)
        {
            return j.contains(key) ? j.at(key).get<std::string>() : dflt;
        }

        SegmentKind segment_kind(const std::string &s)
        {
            if (s == "exterior")
                return SegmentKind::Exterior;
            if (s == "window")
                return SegmentKind::Window;
            if (s == "interior")
                return SegmentKind::Interior;
            if (s == "obstacle")
                return SegmentKind::Obstacle;
            throw config_error("scenario: unknown wall kind '" + s + "'");
        }

        double default_loss(SegmentKind k)
        {
            switch (k)
            {
            case SegmentKind::Exterior:
                return 40.0;
            case SegmentKind::Window:
                return 4.5;
            case SegmentKind::Interior:
                return 10.0;
            case SegmentKind::Obstacle:
                return 0.0;
            }
            return 0.0;
        }
    }

    double Transmitter::gain_offset_db(Point2 towards) const
    {
        if (hpbw_deg >= 360.0)
            return 0.0;
        const double dir = rad2deg(std::atan2(towards.y - pos.y, towards.x - pos.x));
        const double off = wrap_deg(dir - boresight_deg);
        return -std::min(sidelobe_db, 12.0 * (off / hpbw_deg) * (off / hpbw_deg));
    }

    void Scenario::validate() const
    {
        if (rx.empty())
            throw config_error("scenario: rx grid must be non-empty");
        if (tx.empty())
            throw config_error("scenario: at least one transmitter is required");
        for (const auto &w : walls)
            if (w.loss_db < 0.0)
                throw config_error("scenario: wall losses must be >= 0 dB");
        for (const auto &r : reflectors)
            if (r.loss_db < 0.0)
                throw config_error("scenario: reflection losses must be >= 0 dB");
        auto inside = [&](Point2 p) {
            return p.x >= bounds_min.x && p.x <= bounds_max.x && p.y >= bounds_min.y && p.y <= bounds_max.y;
        };
        for (const auto &t : tx)
            if (!inside(t.pos))
                throw config_error("scenario: transmitter " + t.name + " outside bounds");
        for (const auto &r : rx)
            if (!inside(r))
                throw config_error("scenario: receiver outside bounds");
        if (!(steer_step_deg > 0.0))
            throw config_error("scenario: steer_step_deg must be positive");
    }

    Scenario scenario_from_json(const json &j, const SurfaceArray &array, const RadioParams &radio, double q)
    {
        try
        {
            Scenario sc;
            sc.array = array;
            sc.radio = radio;
            sc.element_q = q;
            sc.name = string_or(j, "name", "scenario");
            const json &b = j.at("bounds");
            sc.bounds_min = point2(b, "min");
            sc.bounds_max = point2(b, "max");
            for (const json &w : j.value("walls", json::array()))
            {
                WallSegment s;
                s.name = string_or(w, "name", "");
                s.a = point2(w, "a");
                s.b = point2(w, "b");
                s.kind = segment_kind(string_or(w, "kind", "interior"));
                s.loss_db = number_or(w, "loss_db", default_loss(s.kind));
                sc.walls.push_back(s);
            }
            for (const json &r : j.value("reflectors", json::array()))
                sc.reflectors.push_back(
                    Reflector{string_or(r, "name", ""), point2(r, "a"), point2(r, "b"), number_or(r, "loss_db", 10.0)});
            for (const json &t : j.at("tx"))
            {
                Transmitter tx;
                tx.name = string_or(t, "name", "tx");
                tx.pos = point2(t, "pos");
                tx.boresight_deg = number_or(t, "boresight_deg", 0.0);
                tx.hpbw_deg = number_or(t, "hpbw_deg", 360.0);
                tx.sidelobe_db = number_or(t, "sidelobe_db", 30.0);
                sc.tx.push_back(tx);
            }
            for (const json &r : j.at("rx"))
            {
                if (!r.is_array() || r.size() != 2)
                    throw config_error("scenario: rx entries must be [x, y]");
                sc.rx.push_back({r[0].get<double>(), r[1].get<double>()});
            }
            for (const json &s : j.value("surfaces", json::array()))
                sc.surfaces.push_back(SurfaceSite{string_or(s, "name", ""), point2(s, "center"),
                                                  number_or(s, "yaw_deg", 0.0), number_or(s, "steer_range_deg", 60.0)});
            for (const json &s : j.value("metal_sheets", json::array()))
                sc.metal_sheets.push_back(MetalSheet{string_or(s, "name", ""), point2(s, "center"),
                                                     number_or(s, "yaw_deg", 0.0), number_or(s, "width_m", 0.6),
                                                     number_or(s, "height_m", 0.6)});
            sc.detect_snr_db = number_or(j, "detect_snr_db", 10.0);
            sc.coverage_snr_db = number_or(j, "coverage_snr_db", 30.0);
            sc.steer_step_deg = number_or(j, "steer_step_deg", 0.5);
            if (j.contains("tiers"))
                for (const json &t : j.at("tiers"))
                    sc.tiers.push_back(ModulationTier{t.at("name").get<std::string>(), t.at("min_snr_db").get<double>()});
            else
                sc.tiers = {{"128-QAM", 24.0}, {"64-QAM", 19.0}};
            std::sort(sc.tiers.begin(), sc.tiers.end(),
                      [](const ModulationTier &a, const ModulationTier &b) { return a.min_snr_db > b.min_snr_db; });
            sc.validate();
            return sc;
        }
        catch (const json::exception &e)
        {
            throw config_error(std::string("scenario: ") + e.what());
        }
    }

    json builtin_scenario_json(const std::string &name)
    {
        if (name == "indoor")
            return json::parse(embedded::kIndoorScenarioJson);
        if (name == "outdoor")
            return json::parse(embedded::kOutdoorScenarioJson);
        throw config_error("unknown builtin scenario '" + name + "' (expected indoor or outdoor)");
    }

    const char *path_kind_name(PathKind k)
    {
        switch (k)
        {
        case PathKind::LoS:
            return "los";
        case PathKind::EnvReflection:
            return "env_reflection";
        case PathKind::SurfaceLens:
            return "surface_lens";
        case PathKind::SurfaceMirror:
            return "surface_mirror";
        case PathKind::MetalSheet:
            return "metal_sheet";
        }
        return "?";
    }

    ScenarioEngine::ScenarioEngine(Scenario scenario, PhaseLookupTable lens, PhaseLookupTable mirror)
        : sc_(std::move(scenario)), lens_(std::move(lens)), mirror_(std::move(mirror))
    {
        sc_.validate();
        if (lens_.mode != Mode::Lens || mirror_.mode != Mode::Mirror)
            throw std::invalid_argument("ScenarioEngine: expected a lens table and a mirror table");
    }

    int ScenarioEngine::path_id_count() const
    {
        return 1 + int(sc_.reflectors.size() + sc_.surfaces.size() + sc_.metal_sheets.size());
    }

    bool ScenarioEngine::included(const PathCandidate &p, const Deployment &d) const
    {
        switch (p.kind)
        {
        case PathKind::SurfaceLens:
        case PathKind::SurfaceMirror:
            return d.surfaces < 0 || p.element < d.surfaces;
        case PathKind::MetalSheet:
            return d.metal_sheets;
        default:
            return true;
        }
    }

    // Sum of penetration losses along a->b; +inf when an opaque segment is crossed.
    double ScenarioEngine::penetration_db(Point2 a, Point2 b) const
    {
        double loss = 0.0;
        for (const auto &w : sc_.walls)
        {
            if (!crosses(a, b, w.a, w.b))
                continue;
            if (w.kind == SegmentKind::Obstacle)
                return std::numeric_limits<double>::infinity();
            loss += w.loss_db;
        }
        return loss;
    }

    std::vector<PathCandidate> ScenarioEngine::enumerate_paths(Point2 tx, std::size_t tx_index, Point2 rx) const
    {
        const Transmitter &ant = sc_.tx.at(tx_index);
        std::vector<PathCandidate> out;
        const double noise = sc_.radio.noise_floor_dbm;

        // Direct path.
        {
            const double pen = penetration_db(tx, rx);
            const double d = dist(tx, rx);
            if (std::isfinite(pen) && d > 0.0)
            {
                PathCandidate p;
                p.kind = PathKind::LoS;
                p.path_id = 0;
                p.vertices = {tx, rx};
                p.penetration_loss_db = pen;
                p.snr_db = friis_dbm(sc_.radio, d) + ant.gain_offset_db(rx) - pen - noise;
                out.push_back(p);
            }
        }

        // Environment single-bounce reflections.
        for (std::size_t r = 0; r < sc_.reflectors.size(); ++r)
        {
            const Reflector &ref = sc_.reflectors[r];
            const double len = dist(ref.a, ref.b);
            const Point2 u = scale(1.0 / len, sub(ref.b, ref.a));
            const Specular sp = specular_point(tx, rx, ref.a, u);
            if (!sp.valid || sp.along <= 0.0 || sp.along >= len)
                continue;
            const double pen = penetration_db(tx, sp.point) + penetration_db(sp.point, rx);
            if (!std::isfinite(pen))
                continue;
            const Point2 n{-u.y, u.x};
            PathCandidate p;
            p.kind = PathKind::EnvReflection;
            p.path_id = 1 + int(r);
            p.element = int(r);
            p.vertices = {tx, sp.point, rx};
            p.penetration_loss_db = pen;
            p.theta_in_deg = normal_angle(sub(tx, sp.point), n);
            p.theta_out_deg = normal_angle(sub(rx, sp.point), n);
            const double d = dist(tx, sp.point) + dist(sp.point, rx);
            p.snr_db = friis_dbm(sc_.radio, d) + ant.gain_offset_db(sp.point) - pen - ref.loss_db - noise;
            out.push_back(p);
        }

        for (std::size_t s = 0; s < sc_.surfaces.size(); ++s)
            add_surface_path(out, tx_index, tx, rx, s);
        for (std::size_t s = 0; s < sc_.metal_sheets.size(); ++s)
            add_sheet_path(out, tx_index, tx, rx, s);
        return out;
    }

    void ScenarioEngine::add_surface_path(std::vector<PathCandidate> &out, std::size_t tx_index, Point2 tx, Point2 rx,
                                          std::size_t s) const
    {
        const SurfaceSite &site = sc_.surfaces[s];
        const SurfacePose pose{lift(site.center), site.yaw_deg};
        const int side_t = pose.side(lift(tx));
        const int side_r = pose.side(lift(rx));
        if (side_t == 0 || side_r == 0)
            return;
        const double th_i = pose.signed_angle(lift(tx));
        const double th_s = pose.signed_angle(lift(rx));
        if (std::abs(th_s) > site.steer_range_deg || std::abs(th_i) >= 89.0)
            return;
        const double pen = penetration_db(tx, site.center) + penetration_db(site.center, rx);
        if (!std::isfinite(pen))
            return;
        const Mode mode = side_t == side_r ? Mode::Mirror : Mode::Lens;
        const double cmd_deg = std::round(th_s / sc_.steer_step_deg) * sc_.steer_step_deg;
        const BeamCommand cmd =
            steering_command(sc_.array, mode == Mode::Lens ? lens_ : mirror_, cmd_deg, th_i);
        const double d_i = dist(tx, site.center);
        const double d_s = dist(site.center, rx);
        const double p_rx = received_power_farfield_dbm(sc_.radio, d_i, d_s, th_i, th_s, sc_.array,
                                                        replicate_columns(cmd.coefficients, sc_.array.m_rows),
                                                        sc_.element_q);
        PathCandidate p;
        p.kind = mode == Mode::Lens ? PathKind::SurfaceLens : PathKind::SurfaceMirror;
        p.path_id = 1 + int(sc_.reflectors.size() + s);
        p.element = int(s);
        p.vertices = {tx, site.center, rx};
        p.penetration_loss_db = pen;
        p.theta_in_deg = th_i;
        p.theta_out_deg = th_s;
        p.command_deg = cmd_deg;
        p.snr_db = p_rx + sc_.tx[tx_index].gain_offset_db(site.center) - pen - sc_.radio.noise_floor_dbm;
        out.push_back(p);
    }

    void ScenarioEngine::add_sheet_path(std::vector<PathCandidate> &out, std::size_t tx_index, Point2 tx, Point2 rx,
                                        std::size_t s) const
    {
        const MetalSheet &sh = sc_.metal_sheets[s];
        const Point2 u = yaw_tangent(sh.yaw_deg);
        const Specular sp = specular_point(tx, rx, sh.center, u);
        if (!sp.valid || std::abs(sp.along) > 0.5 * sh.width)
            return;
        const double pen = penetration_db(tx, sp.point) + penetration_db(sp.point, rx);
        if (!std::isfinite(pen))
            return;
        // The sheet is a uniform-phase aperture with |Gamma| = 1 on the surface element grid.
        SurfaceArray grid = sc_.array;
        grid.n_cols = std::max(1, int(std::lround(sh.width / grid.col_spacing)));
        grid.m_rows = std::max(1, int(std::lround(sh.height / grid.row_spacing)));
        const SurfacePose pose{lift(sh.center), sh.yaw_deg};
        const double th_i = pose.signed_angle(lift(tx));
        const double th_s = pose.signed_angle(lift(rx));
        const std::vector<cplx> coef(std::size_t(grid.n_cols) * grid.m_rows, cplx(-1.0, 0.0));
        const double p_rx = received_power_farfield_dbm(sc_.radio, dist(tx, sh.center), dist(sh.center, rx), th_i,
                                                        th_s, grid, coef, sc_.element_q);
        const Point2 n = yaw_normal(sh.yaw_deg);
        PathCandidate p;
        p.kind = PathKind::MetalSheet;
        p.path_id = 1 + int(sc_.reflectors.size() + sc_.surfaces.size() + s);
        p.element = int(s);
        p.vertices = {tx, sp.point, rx};
        p.penetration_loss_db = pen;
        p.theta_in_deg = normal_angle(sub(tx, sp.point), n);
        p.theta_out_deg = normal_angle(sub(rx, sp.point), n);
        p.snr_db = p_rx + sc_.tx[tx_index].gain_offset_db(sh.center) - pen - sc_.radio.noise_floor_dbm;
        out.push_back(p);
    }

    LinkChoice best_link(const std::vector<PathCandidate> &paths, const ScenarioEngine &eng, const Deployment &d)
    {
        LinkChoice best;
        for (const auto &p : paths)
        {
            if (p.blocked || !eng.included(p, d) || p.snr_db < eng.scenario().detect_snr_db)
                continue;
            if (!best.linked || p.snr_db > best.snr_db)
            {
                best.snr_db = p.snr_db;
                best.path = p;
                best.linked = true;
            }
        }
        return best;
    }

    LinkChoice best_link_snr(const ScenarioEngine &eng, std::size_t tx_index, Point2 rx, bool with_surfaces)
    {
        return best_link(eng.enumerate_paths(tx_index, rx), eng, Deployment{with_surfaces ? -1 : 0, false});
    }

    std::vector<CoverageEntry> coverage_map(const ScenarioEngine &eng, std::size_t tx_index, const Deployment &d)
    {
        const Scenario &sc = eng.scenario();
        std::vector<CoverageEntry> out;
        for (const Point2 &rx : sc.rx)
        {
            const LinkChoice c = best_link(eng.enumerate_paths(tx_index, rx), eng, d);
            CoverageEntry e;
            e.rx = rx;
            e.snr_db = c.snr_db;
            e.path_kind = c.linked ? path_kind_name(c.path.kind) : "none";
            for (const auto &t : sc.tiers)
                if (c.linked && c.snr_db >= t.min_snr_db)
                {
                    e.tier = t.name;
                    break;
                }
            out.push_back(e);
        }
        return out;
    }

    double coverage_fraction(const ScenarioEngine &eng, const Deployment &d, double threshold_db)
    {
        std::size_t hit = 0, total = 0;
        for (std::size_t t = 0; t < eng.scenario().tx.size(); ++t)
            for (const auto &e : coverage_map(eng, t, d))
            {
                ++total;
                if (e.snr_db >= threshold_db)
                    ++hit;
            }
        return total ? double(hit) / double(total) : 0.0;
    }

    BlockageResult blockage_failure_rate(const ScenarioEngine &eng, const std::vector<double> &beta, int trials,
                                         std::uint64_t seed)
    {
        if (trials < 1)
            throw std::invalid_argument("blockage_failure_rate: trials must be >= 1");
        for (double b : beta)
            if (!(b >= 0.0 && b <= 1.0))
                throw std::invalid_argument("blockage_failure_rate: beta must lie in [0, 1]");
        const Scenario &sc = eng.scenario();
        const int n_surf = int(sc.surfaces.size());
        const int n_ids = eng.path_id_count();

        // Usable candidates per pair: (path id, surface index or -1).
        struct Usable
        {
            int id;
            int surface;
        };
        std::vector<std::vector<Usable>> pairs;
        for (std::size_t t = 0; t < sc.tx.size(); ++t)
            for (const Point2 &rx : sc.rx)
            {
                std::vector<Usable> u;
                for (const auto &p : eng.enumerate_paths(t, rx))
                {
                    if (p.snr_db < sc.detect_snr_db || p.kind == PathKind::MetalSheet)
                        continue;
                    const bool surf = p.kind == PathKind::SurfaceLens || p.kind == PathKind::SurfaceMirror;
                    u.push_back(Usable{p.path_id, surf ? p.element : -1});
                }
                pairs.push_back(std::move(u));
            }

        BlockageResult res;
        res.beta = beta;
        res.trials = trials;
        res.seed = seed;
        std::vector<std::vector<long long>> fails(n_surf + 1, std::vector<long long>(beta.size(), 0));
        std::vector<double> draws(n_ids);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int trial = 0; trial < trials; ++trial)
        {
            std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(trial)};
            std::mt19937_64 rng(ss);
            for (const auto &cands : pairs)
            {
                for (int i = 0; i < n_ids; ++i)
                    draws[i] = unif(rng);
                for (int k = 0; k <= n_surf; ++k)
                {
                    // The link survives at beta iff some included candidate drew u >= beta.
                    double best = -1.0;
                    for (const auto &c : cands)
                        if (c.surface < k)
                            best = std::max(best, draws[c.id]);
                    for (std::size_t b = 0; b < beta.size(); ++b)
                        if (!(best >= beta[b]))
                            ++fails[k][b];
                }
            }
        }
        const double n = double(trials) * double(pairs.size());
        for (int k = 0; k <= n_surf; ++k)
        {
            BlockageCurve c;
            c.surfaces = k;
            for (std::size_t b = 0; b < beta.size(); ++b)
            {
                const double p = double(fails[k][b]) / n;
                const double h = 1.96 * std::sqrt(p * (1.0 - p) / n);
                c.failure.push_back(p);
                c.ci_low.push_back(std::max(0.0, p - h));
                c.ci_high.push_back(std::min(1.0, p + h));
            }
            res.curves.push_back(c);
        }
        return res;
    }
}
