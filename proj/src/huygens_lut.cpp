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

#include "hms/huygens_lut.hpp"

#include <algorithm>
#include <sstream>

namespace hms
{
    const char *mode_name(Mode m) { return m == Mode::Lens ? "lens" : "mirror"; }

    Mode parse_mode(const std::string &s)
    {
        if (s == "lens")
            return Mode::Lens;
        if (s == "mirror")
            return Mode::Mirror;
        throw config_error("unknown mode '" + s + "' (expected lens or mirror)");
    }

    double DacSpec::lsb() const { return full_scale / double((std::uint64_t(1) << bits) - 1); }

    std::uint32_t DacSpec::to_code(double volts) const
    {
        const double max_code = double((std::uint64_t(1) << bits) - 1);
        const double c = std::clamp(std::round(volts / lsb()), 0.0, max_code);
        return static_cast<std::uint32_t>(c);
    }

    double DacSpec::to_volts(std::uint32_t code) const { return double(code) * lsb(); }

    ControlState make_control(double u_m, double u_e, const DacSpec &dac)
    {
        return ControlState{u_m, u_e, dac.to_code(u_m), dac.to_code(u_e)};
    }

    std::size_t HuygensPattern::freq_index(double f) const
    {
        for (std::size_t i = 0; i < freqs.size(); ++i)
            if (std::abs(freqs[i] - f) <= 1.0)
                return i;
        throw std::invalid_argument("pattern does not contain frequency " + std::to_string(f) + " Hz");
    }

    std::vector<double> uniform_grid(double lo, double hi, double step)
    {
        if (!(step > 0.0) || hi < lo)
            throw std::invalid_argument("uniform_grid: need step > 0 and hi >= lo");
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        std::vector<double> g(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            g[i] = lo + double(i) * step;
        // Snap the last point onto hi when the step divides the range.
        if (n > 0 && std::abs(g[n] - hi) < 1e-9 * std::max(1.0, std::abs(hi)))
            g[n] = hi;
        return g;
    }

    HuygensPattern sweep_pattern(const CellConfig &cell, const std::vector<double> &freqs,
                                 const std::vector<double> &u_m, const std::vector<double> &u_e)
    {
        if (freqs.empty() || u_m.empty() || u_e.empty())
            throw std::invalid_argument("sweep_pattern: grids must be non-empty");
        for (const auto *grid : {&u_m, &u_e})
            for (double v : *grid)
                if (v < cell.varactor.v_min || v > cell.varactor.v_max)
                    throw std::invalid_argument("sweep_pattern: bias " + std::to_string(v) + " V outside range");

        HuygensPattern p;
        p.freqs = freqs;
        p.u_m = u_m;
        p.u_e = u_e;
        p.data.resize(freqs.size() * u_m.size() * u_e.size());
        std::size_t k = 0;
        for (double f : freqs)
            for (double vm : u_m)
                for (double ve : u_e)
                {
                    try
                    {
                        p.data[k++] = cell_response(cell, f, vm, ve);
                    }
                    catch (const std::exception &e)
                    {
                        std::ostringstream os;
                        os << "sweep_pattern at f=" << f << " Hz, u_m=" << vm << " V, u_e=" << ve << " V: " << e.what();
                        if (dynamic_cast<const singularity_error *>(&e))
                            throw singularity_error(os.str());
                        throw std::domain_error(os.str());
                    }
                }
        return p;
    }

    std::size_t PhaseLookupTable::bin_index(double phase_deg) const
    {
        const auto n = entries.size();
        const double x = wrap_deg(phase_deg) + 180.0 + 0.5 * phase_step;
        return static_cast<std::size_t>(std::floor(x / phase_step)) % n;
    }

    std::size_t PhaseLookupTable::flagged_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [](const LutEntry &e) { return e.flagged; }));
    }

    namespace
    {
        struct Candidate
        {
            std::size_t i_m = 0, i_e = 0;
            double mag = -1.0;
            double phase = 0.0;
            double sum = 0.0; // u_m + u_e, tie-break key
            double u_m = 0.0;
            bool valid() const { return mag >= 0.0; }
        };

        // Strict weak "better" ordering: larger magnitude, then lower u_m + u_e, then lower u_m.
        bool better(const Candidate &a, const Candidate &b)
        {
            if (!b.valid())
                return a.valid();
            if (a.mag != b.mag)
                return a.mag > b.mag;
            if (a.sum != b.sum)
                return a.sum < b.sum;
            return a.u_m < b.u_m;
        }

        double circ_dist(double a, double b) { return std::abs(wrap_deg(a - b)); }

        // Coefficients this close to zero carry no usable phase.
        constexpr double kMinMagnitude = 1e-12;

        struct BinResult
        {
            std::vector<Candidate> best;
            std::vector<bool> flagged;
            std::size_t n_candidates = 0;
        };

        BinResult best_per_bin(const HuygensPattern &pattern, std::size_t fi, Mode mode, double step)
        {
            const auto nbins = static_cast<std::size_t>(std::lround(360.0 / step));
            PhaseLookupTable tmp;
            tmp.phase_step = step;
            tmp.entries.resize(nbins);

            BinResult r;
            r.best.resize(nbins);
            r.flagged.assign(nbins, false);
            std::vector<Candidate> all;
            all.reserve(pattern.u_m.size() * pattern.u_e.size());
            for (std::size_t im = 0; im < pattern.u_m.size(); ++im)
                for (std::size_t ie = 0; ie < pattern.u_e.size(); ++ie)
                {
                    const cplx c = mode_coefficient(pattern.at(fi, im, ie), mode);
                    const double mag = std::abs(c);
                    if (!(mag > kMinMagnitude))
                        continue;
                    Candidate cand{im, ie, mag, arg_deg(c), pattern.u_m[im] + pattern.u_e[ie], pattern.u_m[im]};
                    const auto b = tmp.bin_index(cand.phase);
                    if (better(cand, r.best[b]))
                        r.best[b] = cand;
                    all.push_back(cand);
                }
            r.n_candidates = all.size();
            if (all.empty())
                return r;
            for (std::size_t b = 0; b < nbins; ++b)
            {
                if (r.best[b].valid())
                    continue;
                const double target = -180.0 + double(b) * step;
                Candidate pick;
                double pick_d = 1e9;
                for (const auto &c : all)
                {
                    const double d = circ_dist(c.phase, target);
                    if (d < pick_d || (d == pick_d && better(c, pick)))
                    {
                        pick = c;
                        pick_d = d;
                    }
                }
                r.best[b] = pick;
                r.flagged[b] = true;
            }
            return r;
        }

        void check_step(double step)
        {
            const double n = 360.0 / step;
            if (!(step > 0.0) || std::abs(n - std::round(n)) > 1e-9)
                throw std::invalid_argument("phase_step must divide 360");
        }
    }

    PhaseLookupTable build_lut(const HuygensPattern &pattern, Mode mode, double phase_step, double center_freq,
                               const DacSpec &dac)
    {
        if (pattern.data.empty() || pattern.u_m.empty() || pattern.u_e.empty())
            throw std::invalid_argument("build_lut: empty pattern");
        check_step(phase_step);
        const std::size_t fi = pattern.freq_index(center_freq);
        const BinResult r = best_per_bin(pattern, fi, mode, phase_step);
        const std::size_t nbins = r.best.size();
        if (r.n_candidates == 0)
            throw coverage_error(std::string("build_lut: no usable ") + mode_name(mode) + " coefficient in pattern");

        PhaseLookupTable lut;
        lut.mode = mode;
        lut.center_freq = pattern.freqs[fi];
        lut.phase_step = phase_step;
        lut.entries.resize(nbins);
        for (std::size_t b = 0; b < nbins; ++b)
        {
            const Candidate &c = r.best[b];
            LutEntry &e = lut.entries[b];
            e.target_deg = -180.0 + double(b) * phase_step;
            e.control = make_control(pattern.u_m[c.i_m], pattern.u_e[c.i_e], dac);
            e.achieved = pattern.at(fi, c.i_m, c.i_e);
            e.flagged = r.flagged[b];
        }
        if (4 * lut.flagged_count() > nbins)
            throw coverage_error("build_lut: " + std::to_string(lut.flagged_count()) + " of " + std::to_string(nbins) +
                                 " " + mode_name(mode) + " bins have no candidate");
        return lut;
    }

    cplx efficiency_from_coefficients(const std::vector<cplx> &per_degree)
    {
        if (per_degree.size() != 360)
            throw std::invalid_argument("efficiency: need 360 per-degree coefficients");
        cplx acc{0.0, 0.0};
        for (int k = 0; k < 360; ++k)
            acc += per_degree[k] * std::polar(1.0, -deg2rad(-180.0 + k));
        return acc / 360.0;
    }

    cplx efficiency(const HuygensPattern &pattern, double freq, Mode mode)
    {
        const std::size_t fi = pattern.freq_index(freq);
        const BinResult r = best_per_bin(pattern, fi, mode, 1.0);
        std::vector<cplx> c(360, cplx{0.0, 0.0});
        if (r.n_candidates > 0)
            for (std::size_t k = 0; k < 360; ++k)
                c[k] = mode_coefficient(pattern.at(fi, r.best[k].i_m, r.best[k].i_e), mode);
        return efficiency_from_coefficients(c);
    }

    BandwidthProfile bandwidth_profile(const PhaseLookupTable &lut, const CellConfig &cell,
                                       const std::vector<double> &freqs, double window_hz)
    {
        BandwidthProfile bp;
        bp.freqs = freqs;
        bp.window_hz = window_hz;
        bp.curves.resize(lut.entries.size());
        bp.max_phase_dev_deg.assign(lut.entries.size(), 0.0);
        for (std::size_t i = 0; i < lut.entries.size(); ++i)
        {
            const LutEntry &e = lut.entries[i];
            const cplx ref = lut.coefficient(e);
            bp.curves[i].reserve(freqs.size());
            for (double f : freqs)
            {
                const cplx c = mode_coefficient(cell_response(cell, f, e.control.u_m, e.control.u_e), lut.mode);
                bp.curves[i].push_back(c);
                if (std::abs(f - lut.center_freq) <= window_hz + 1e-3)
                    bp.max_phase_dev_deg[i] = std::max(bp.max_phase_dev_deg[i], std::abs(rad2deg(std::arg(c / ref))));
            }
        }
        return bp;
    }
}
