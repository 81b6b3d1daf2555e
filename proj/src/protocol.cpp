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

#include "hms/protocol.hpp"

#include <algorithm>

namespace hms
{
    namespace
    {
        constexpr double kNoArm = 1e9;
        constexpr double kMaxAngle = 89.0;

        double clamp_angle(double a) { return std::clamp(a, -kMaxAngle, kMaxAngle); }

        double add_dbm(double a, double b)
        {
            if (std::isinf(a) && a < 0.0)
                return b;
            if (std::isinf(b) && b < 0.0)
                return a;
            return 10.0 * std::log10(std::pow(10.0, a / 10.0) + std::pow(10.0, b / 10.0));
        }

        bool same_beam(const SurfaceBeam &a, const SurfaceBeam &b)
        {
            if (a.arms.size() != b.arms.size())
                return false;
            for (std::size_t i = 0; i < a.arms.size(); ++i)
                if (a.arms[i].angle_deg != b.arms[i].angle_deg || a.arms[i].width_deg != b.arms[i].width_deg)
                    return false;
            return true;
        }

        SurfaceBeam single(double angle, double width = 0.0) { return SurfaceBeam{{BeamSpec{angle, width}}}; }
    }

    const char *role_name(NodeRole r)
    {
        switch (r)
        {
        case NodeRole::ENodeB:
            return "enodeb";
        case NodeRole::Surface:
            return "surface";
        case NodeRole::UE:
            return "ue";
        }
        return "?";
    }

    std::vector<double> make_codebook(int n, double span_deg)
    {
        if (n < 1)
            throw std::invalid_argument("make_codebook: size must be >= 1");
        if (!(span_deg >= 0.0) || span_deg >= 90.0)
            throw std::invalid_argument("make_codebook: span must lie in [0, 90)");
        std::vector<double> out(n, 0.0);
        const double step = codebook_step(n, span_deg);
        for (int i = 0; i < n && n > 1; ++i)
            out[i] = -span_deg + step * double(i);
        return out;
    }

    double ula_gain_dbi(int elements, const BeamSpec &beam, double truth_deg)
    {
        if (elements < 1)
            throw std::invalid_argument("ula_gain_dbi: element count must be >= 1");
        int active = elements;
        if (beam.width_deg > 0.0)
        {
            const double ds = std::abs(std::sin(deg2rad(clamp_angle(beam.angle_deg + beam.width_deg / 2.0))) -
                                       std::sin(deg2rad(clamp_angle(beam.angle_deg - beam.width_deg / 2.0))));
            // Half-power width of n half-wavelength elements is about 1.772/n in sine space.
            if (ds > 0.0)
                active = std::clamp(int(std::lround(1.772 / ds)), 1, elements);
        }
        const double psi = kPi * (std::sin(deg2rad(truth_deg)) - std::sin(deg2rad(beam.angle_deg)));
        cplx af{0.0, 0.0};
        for (int n = 0; n < active; ++n)
            af += std::polar(1.0, double(n) * psi);
        const double g = std::norm(af) / double(active);
        return 10.0 * std::log10(std::max(g, 1e-30));
    }

    void ChannelParams::validate() const
    {
        array.validate();
        if (enodeb_elements < 1 || ue_elements < 1)
            throw std::invalid_argument("channel: element counts must be >= 1");
        if (!(d_enodeb_surface > 0.0) || !(d_surface_ue > 0.0))
            throw std::invalid_argument("channel: distances must be positive");
        for (double a : {truth_enodeb_deg, truth_incident_deg, truth_surface_deg, truth_ue_deg, direct_enodeb_deg,
                         direct_ue_deg})
            if (!(std::abs(a) < 90.0))
                throw std::invalid_argument("channel: angles must lie in (-90, 90)");
        if (direct_loss_db < 0.0)
            throw std::invalid_argument("channel: direct-path loss must be >= 0");
    }

    ProtocolChannel::ProtocolChannel(ChannelParams params, PhaseLookupTable lens, PhaseLookupTable mirror)
        : p_(std::move(params)), lens_(std::move(lens)), mirror_(std::move(mirror))
    {
        p_.validate();
        if (!p_.ideal_surface && (lens_.entries.empty() || mirror_.entries.empty()))
            throw std::invalid_argument("channel: lookup tables required unless ideal_surface is set");
    }

    BeamCommand ProtocolChannel::surface_command(const SurfaceBeam &beam, Mode mode) const
    {
        if (beam.arms.empty() || beam.arms.size() > 2)
            throw std::invalid_argument("surface beam: one or two arms required");
        const SurfaceArray &arr = p_.array;
        const double kd = 2.0 * kPi / arr.lambda() * arr.col_spacing;
        const double si = std::sin(deg2rad(p_.truth_incident_deg));
        const std::size_t n_cols = std::size_t(arr.n_cols);
        const std::size_t n_arms = beam.arms.size();
        // Local steering sine per column. Each arm owns a contiguous block of columns and sweeps
        // its sector linearly across the block; a zero-width arm is a plain steered beam.
        std::vector<double> s(n_cols);
        for (std::size_t n = 0; n < n_cols; ++n)
        {
            const std::size_t a = std::min(n * n_arms / n_cols, n_arms - 1);
            const std::size_t first = (a * n_cols + n_arms - 1) / n_arms;
            const std::size_t last = ((a + 1) * n_cols + n_arms - 1) / n_arms;
            const BeamSpec &b = beam.arms[a];
            const double s_lo = std::sin(deg2rad(clamp_angle(b.angle_deg - b.width_deg / 2.0)));
            const double s_hi = std::sin(deg2rad(clamp_angle(b.angle_deg + b.width_deg / 2.0)));
            const double t = (double(n - first) + 0.5) / double(last - first);
            s[n] = s_lo + (s_hi - s_lo) * t;
        }
        // Integrate the phase gradient so the profile stays continuous across the arm boundary.
        std::vector<double> phases(n_cols, 0.0);
        double acc = 0.0;
        for (std::size_t n = 1; n < n_cols; ++n)
        {
            acc -= kd * ((s[n - 1] + s[n]) / 2.0 + si);
            phases[n] = wrap_deg(rad2deg(acc));
        }
        if (p_.ideal_surface)
            return ideal_command(mode, phases);
        return profile_command(arr, mode == Mode::Lens ? lens_ : mirror_, phases, p_.truth_incident_deg);
    }

    double ProtocolChannel::relay_dbm(const SurfaceBeam &surface, Mode mode, bool uplink) const
    {
        if (!p_.surface_enabled || mode != p_.geometry_mode)
            return -std::numeric_limits<double>::infinity();
        const BeamSpec a = surface.arms.at(0);
        const BeamSpec b = surface.arms.size() > 1 ? surface.arms[1] : BeamSpec{kNoArm, kNoArm};
        const auto key = std::make_tuple(a.angle_deg, a.width_deg, b.angle_deg, b.width_deg,
                                         int(mode) * 2 + (uplink ? 1 : 0));
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
        const BeamCommand cmd = surface_command(surface, mode);
        const auto coefs = replicate_columns(cmd.coefficients, p_.array.m_rows);
        RadioParams r = p_.radio;
        r.g_t_dbi = 0.0;
        r.g_r_dbi = 0.0;
        const double v = uplink ? received_power_farfield_dbm(r, p_.d_surface_ue, p_.d_enodeb_surface,
                                                               p_.truth_surface_deg, p_.truth_incident_deg,
                                                               p_.array, coefs, p_.element_q)
                                : received_power_farfield_dbm(r, p_.d_enodeb_surface, p_.d_surface_ue,
                                                               p_.truth_incident_deg, p_.truth_surface_deg,
                                                               p_.array, coefs, p_.element_q);
        cache_.emplace(key, v);
        return v;
    }

    double ProtocolChannel::total_snr(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode mode,
                                      const BeamSpec &ue, bool uplink) const
    {
        const double ge = ula_gain_dbi(p_.enodeb_elements, enodeb, p_.truth_enodeb_deg);
        const double gu = ula_gain_dbi(p_.ue_elements, ue, p_.truth_ue_deg);
        double p = relay_dbm(surface, mode, uplink) + ge + gu;
        if (p_.direct_distance > 0.0)
        {
            RadioParams r = p_.radio;
            r.g_t_dbi = ula_gain_dbi(p_.enodeb_elements, enodeb, p_.direct_enodeb_deg);
            r.g_r_dbi = ula_gain_dbi(p_.ue_elements, ue, p_.direct_ue_deg);
            p = add_dbm(p, friis_dbm(r, p_.direct_distance) - p_.direct_loss_db);
        }
        return p - p_.radio.noise_floor_dbm;
    }

    double ProtocolChannel::snr_db(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode surface_mode,
                                   const BeamSpec &ue) const
    {
        return total_snr(enodeb, surface, surface_mode, ue, false);
    }

    double ProtocolChannel::uplink_snr_db(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode surface_mode,
                                          const BeamSpec &ue) const
    {
        return total_snr(enodeb, surface, surface_mode, ue, true);
    }

    double ProtocolChannel::oracle_snr_db() const
    {
        return snr_db(BeamSpec{p_.truth_enodeb_deg, 0.0}, single(p_.truth_surface_deg), p_.geometry_mode,
                      BeamSpec{p_.truth_ue_deg, 0.0});
    }

    void SurfaceNode::deliver(const ControlMessage &msg)
    {
        if (msg.from != NodeRole::UE || msg.to != NodeRole::Surface)
            throw std::logic_error("surface accepts control messages from the UE only");
        if (msg.kind == "set_mode")
            mode_ = msg.mode;
        else if (msg.kind == "set_beam")
            beam_ = msg.beam;
        else
            throw std::logic_error("surface: unknown control message '" + msg.kind + "'");
    }

    BeamSession::BeamSession(const ProtocolChannel &channel, ProtocolOptions options, std::uint64_t seed)
        : ch_(channel), opt_(options), rng_(seed)
    {
        if (opt_.refine_beams < 1 || opt_.refine_beams % 2 == 0)
            throw std::invalid_argument("protocol: refine_beams must be odd and >= 1");
        if (opt_.noise_sigma_db < 0.0 || !(opt_.tolerance_deg > 0.0))
            throw std::invalid_argument("protocol: noise sigma must be >= 0 and tolerance positive");
    }

    void BeamSession::send(ControlMessage msg)
    {
        msg.seq = seq_++;
        surface_.deliver(msg);
        messages_.push_back(std::move(msg));
    }

    void BeamSession::ue_set_mode(Mode mode)
    {
        if (surface_.mode() == mode && !messages_.empty())
            return;
        ControlMessage m;
        m.kind = "set_mode";
        m.mode = mode;
        send(m);
    }

    void BeamSession::ue_set_beam(const SurfaceBeam &beam)
    {
        if (same_beam(surface_.beam(), beam))
            return;
        ControlMessage m;
        m.kind = "set_beam";
        m.mode = surface_.mode();
        m.beam = beam;
        send(m);
    }

    double BeamSession::probe(const std::string &stage, const BeamSpec &e, const SurfaceBeam &w, const BeamSpec &u)
    {
        ue_set_beam(w);
        double snr = ch_.snr_db(e, surface_.beam(), surface_.mode(), u);
        if (opt_.noise_sigma_db > 0.0)
            snr += std::normal_distribution<double>(0.0, opt_.noise_sigma_db)(rng_);
        ProbeRecord rec;
        rec.index = probes_.size();
        rec.stage = stage;
        rec.enodeb_deg = e.angle_deg;
        for (const BeamSpec &a : w.arms)
            rec.surface_deg.push_back(a.angle_deg);
        rec.ue_deg = u.angle_deg;
        rec.snr_db = snr;
        probes_.push_back(rec);
        return snr;
    }

    void BeamSession::finish(AlignmentResult &r) const
    {
        const ChannelParams &p = ch_.params();
        r.snr_db = ch_.snr_db(BeamSpec{r.enodeb_deg, 0.0}, single(r.surface_deg), surface_.mode(),
                              BeamSpec{r.ue_deg, 0.0});
        r.oracle_snr_db = ch_.oracle_snr_db();
        const bool aligned = std::abs(r.enodeb_deg - p.truth_enodeb_deg) <= opt_.tolerance_deg &&
                             std::abs(r.surface_deg - p.truth_surface_deg) <= opt_.tolerance_deg &&
                             std::abs(r.ue_deg - p.truth_ue_deg) <= opt_.tolerance_deg;
        r.success = r.detected && aligned;
    }

    AlignmentResult BeamSession::exhaustive(const std::string &name, const std::vector<double> &ce,
                                            const std::vector<double> &cw, const std::vector<double> &cu, double we,
                                            double ww, double wu)
    {
        AlignmentResult r;
        r.procedure = name;
        double best = -std::numeric_limits<double>::infinity();
        for (double e : ce)
            for (double w : cw)
                for (double u : cu)
                {
                    const double s = probe(name, BeamSpec{e, we}, single(w, ww), BeamSpec{u, wu});
                    ++r.probes_used;
                    if (s > best)
                    {
                        best = s;
                        r.enodeb_deg = e;
                        r.surface_deg = w;
                        r.ue_deg = u;
                    }
                }
        r.probe_snr_db = best;
        r.detected = best >= opt_.detect_snr_db;
        return r;
    }

    AlignmentResult BeamSession::cold_start(int n_e, int n_w, int n_u)
    {
        ue_set_mode(ch_.params().geometry_mode);
        const double span = opt_.codebook_span_deg;
        const double se = codebook_step(n_e, span), sw = codebook_step(n_w, span), su = codebook_step(n_u, span);
        AlignmentResult r = exhaustive("cold_start", make_codebook(n_e, span), make_codebook(n_w, span),
                                       make_codebook(n_u, span), se, sw, su);
        r.enodeb_step_deg = se;
        r.surface_step_deg = sw;
        r.ue_step_deg = su;
        finish(r);
        return r;
    }

    AlignmentResult BeamSession::steady_state(double enodeb_deg, int n_w, int n_u)
    {
        ue_set_mode(ch_.params().geometry_mode);
        const double span = opt_.codebook_span_deg;
        const double sw = codebook_step(n_w, span), su = codebook_step(n_u, span);
        AlignmentResult r =
            exhaustive("steady_state", {enodeb_deg}, make_codebook(n_w, span), make_codebook(n_u, span), 0.0, sw, su);
        r.surface_step_deg = sw;
        r.ue_step_deg = su;
        finish(r);
        return r;
    }

    AlignmentResult BeamSession::refine(const AlignmentResult &coarse, int levels)
    {
        if (!coarse.detected)
            throw std::invalid_argument("refine: coarse alignment was not detected");
        if (levels < 0)
            throw std::invalid_argument("refine: levels must be >= 0");
        AlignmentResult r = coarse;
        r.procedure = coarse.procedure + "+refine";
        double angle[3] = {coarse.enodeb_deg, coarse.surface_deg, coarse.ue_deg};
        double width[3] = {coarse.enodeb_step_deg, coarse.surface_step_deg, coarse.ue_step_deg};
        const double step[3] = {coarse.enodeb_step_deg, coarse.surface_step_deg, coarse.ue_step_deg};
        const int half = (opt_.refine_beams - 1) / 2;
        double last = coarse.probe_snr_db;
        std::uint64_t extra = 0;

        // Leg order ENodeB, surface, UE; the UE receive beam is refined last on every level.
        for (int level = 1; level <= levels; ++level)
            for (int leg = 0; leg < 3; ++leg)
            {
                if (step[leg] <= 0.0)
                    continue;
                const double h = step[leg] / std::pow(2.0, level);
                const double spacing = half > 0 ? h / double(half) : h;
                std::vector<double> offsets{0.0};
                for (int i = 1; i <= half; ++i)
                {
                    offsets.push_back(-spacing * i);
                    offsets.push_back(spacing * i);
                }
                double best = -std::numeric_limits<double>::infinity();
                double best_angle = angle[leg];
                for (double off : offsets)
                {
                    double a[3] = {angle[0], angle[1], angle[2]};
                    double w[3] = {width[0], width[1], width[2]};
                    a[leg] = clamp_angle(angle[leg] + off);
                    w[leg] = spacing;
                    const double s =
                        probe("refine", BeamSpec{a[0], w[0]}, single(a[1], w[1]), BeamSpec{a[2], w[2]});
                    ++extra;
                    if (s > best) // the centre is probed first and wins ties
                    {
                        best = s;
                        best_angle = a[leg];
                    }
                }
                angle[leg] = best_angle;
                width[leg] = spacing;
                last = best;
            }

        r.probes_used = coarse.probes_used + extra;
        if (last < coarse.probe_snr_db - opt_.revert_drop_db)
        {
            r.enodeb_deg = coarse.enodeb_deg;
            r.surface_deg = coarse.surface_deg;
            r.ue_deg = coarse.ue_deg;
            r.reverted = true;
        }
        else
        {
            r.enodeb_deg = angle[0];
            r.surface_deg = angle[1];
            r.ue_deg = angle[2];
            r.probe_snr_db = last;
            r.detected = last >= opt_.detect_snr_db;
        }
        finish(r);
        return r;
    }

    AlignmentResult BeamSession::uplink_from_downlink(const AlignmentResult &downlink) const
    {
        if (!downlink.detected)
            throw std::invalid_argument("uplink_from_downlink: downlink alignment was not detected");
        AlignmentResult r = downlink;
        r.procedure = "uplink";
        r.probes_used = 0;
        r.snr_db = ch_.uplink_snr_db(BeamSpec{r.enodeb_deg, 0.0}, single(r.surface_deg), surface_.mode(),
                                     BeamSpec{r.ue_deg, 0.0});
        return r;
    }

    AlignmentResult BeamSession::multiarm(int n_w, double enodeb_deg, double ue_deg, int refine_levels)
    {
        ue_set_mode(ch_.params().geometry_mode);
        const double span = opt_.codebook_span_deg;
        const std::vector<double> cw = make_codebook(n_w, span);
        const double step = codebook_step(n_w, span);
        const BeamSpec e{enodeb_deg, 0.0}, u{ue_deg, 0.0};

        // Beam covering codebook entries [a, b): one arm per half of the range.
        auto sector = [&](std::size_t a, std::size_t b) {
            auto arm = [&](std::size_t lo, std::size_t hi) {
                return BeamSpec{(cw[lo] + cw[hi - 1]) / 2.0, cw[hi - 1] - cw[lo] + step};
            };
            if (b - a == 1)
                return SurfaceBeam{{arm(a, b)}};
            const std::size_t q = a + (b - a + 1) / 2;
            return SurfaceBeam{{arm(a, q), arm(q, b)}};
        };

        AlignmentResult r;
        r.procedure = "multiarm";
        std::size_t lo = 0, hi = cw.size();
        double chosen = -std::numeric_limits<double>::infinity();
        while (hi - lo > 1)
        {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            const double sa = probe("multiarm", e, sector(lo, mid), u);
            const double sb = probe("multiarm", e, sector(mid, hi), u);
            r.probes_used += 2;
            if (std::max(sa, sb) < opt_.detect_snr_db)
            {
                r.fallback = true;
                break;
            }
            const std::size_t size = mid - lo;
            if (hi - lo > 2 && std::abs(sa - sb) <= opt_.ambiguity_db)
            {
                // Comparable halves: the path sits near the split, keep the middle of the region.
                lo = std::min(mid - size / 2, hi - size);
                hi = lo + size;
                chosen = std::max(sa, sb);
            }
            else if (sa >= sb)
            {
                hi = mid;
                chosen = sa;
            }
            else
            {
                lo = mid;
                chosen = sb;
            }
        }

        if (r.fallback)
        {
            const std::uint64_t used = r.probes_used;
            r = exhaustive("multiarm_fallback", {enodeb_deg}, cw, {ue_deg}, 0.0, step, 0.0);
            r.procedure = "multiarm";
            r.probes_used += used;
            r.fallback = true;
        }
        else
        {
            if (n_w == 1)
            {
                chosen = probe("multiarm", e, single(cw[0], step), u);
                r.probes_used += 1;
            }
            r.surface_deg = cw[lo];
            r.enodeb_deg = enodeb_deg;
            r.ue_deg = ue_deg;
            r.probe_snr_db = chosen;
            r.detected = chosen >= opt_.detect_snr_db;
        }
        r.surface_step_deg = step;
        finish(r);
        if (refine_levels > 0 && r.detected)
        {
            const bool fb = r.fallback;
            r = refine(r, refine_levels);
            r.procedure = "multiarm";
            r.fallback = fb;
        }
        return r;
    }
}
