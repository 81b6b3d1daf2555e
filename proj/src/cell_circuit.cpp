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

#include "hms/cell_circuit.hpp"

#include <limits>

namespace hms
{
    void UnitCellGeometry::validate() const
    {
        if (!(R > 0.0) || !(w > 0.0) || !(t > 0.0))
            throw std::invalid_argument("UnitCellGeometry: all lengths must be positive");
        if (!(g >= 0.0)) // g = 0 is a closed loop
            throw std::invalid_argument("UnitCellGeometry: gap must be non-negative");
        if (g >= 2.0 * kPi * R)
            throw std::invalid_argument("UnitCellGeometry: gap must be shorter than the loop circumference");
        if (!(eps_r >= 1.0))
            throw std::invalid_argument("UnitCellGeometry: eps_r must be >= 1");
    }

    void VaractorModel::validate() const
    {
        if (!(c_j0 > 0.0) || !(phi_j > 0.0) || !(gamma > 0.0))
            throw std::invalid_argument("VaractorModel: c_j0, phi_j and gamma must be positive");
        // C(V) is strictly decreasing whenever 1 + V/phi_j stays positive.
        if (!(v_max > v_min) || v_min <= -phi_j)
            throw std::invalid_argument("VaractorModel: need v_max > v_min > -phi_j");
    }

    double varactor_capacitance(const VaractorModel &model, double bias)
    {
        if (!(bias >= model.v_min && bias <= model.v_max))
            throw std::out_of_range("varactor_capacitance: bias " + std::to_string(bias) + " V outside [" +
                                    std::to_string(model.v_min) + ", " + std::to_string(model.v_max) + "]");
        return model.c_j0 / std::pow(1.0 + bias / model.phi_j, model.gamma);
    }

    double effective_permittivity(double eps_r, double t, double w)
    {
        return 0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) / std::sqrt(1.0 + 12.0 * t / w);
    }

    double strip_inductance(double l, double w)
    {
        const double u = l / w;
        const double bracket = 2.0 * std::asinh(u) + 2.0 * u * std::asinh(1.0 / u) -
                               2.0 * std::pow(w * w + l * l, 1.5) / (3.0 * l * w * w) + (2.0 / 3.0) * u * u +
                               (2.0 / 3.0) / u;
        return kMu0 * l / (4.0 * kPi) * bracket;
    }

    namespace
    {
        double loop_inductance(const UnitCellGeometry &g)
        {
            const double arg = 8.0 * g.R / (g.t + g.w);
            if (!(arg > 0.0))
                throw std::domain_error("loop inductance: non-positive log argument");
            const double L = kMu0 * g.R * (std::log(arg) - 0.5);
            if (!(L > 0.0))
                throw std::domain_error("loop inductance: geometry gives non-positive inductance");
            return L;
        }

        void gap_capacitances(const UnitCellGeometry &g, CircuitBreakdown &b)
        {
            b.eps_eff = effective_permittivity(g.eps_r, g.t, g.w);
            const double eps = kEps0 * b.eps_eff;
            const double log_arg = 4.0 * g.R / g.g;
            if (!(log_arg > 1.0))
                throw std::domain_error("surface capacitance: 4R/g must exceed 1");
            b.C_gap = eps * g.w * g.t / g.g + eps * (g.t + g.w + g.g);
            b.C_surf = 2.0 * eps * (g.t + g.w) / kPi * std::log(log_arg);
        }

        void check_inputs(const UnitCellGeometry &geom, Side expected, double c_var)
        {
            if (geom.side != expected)
                throw std::invalid_argument("circuit: geometry side does not match the requested circuit");
            geom.validate();
            if (!(c_var > 0.0))
                throw std::invalid_argument("circuit: c_var must be positive");
        }
    }

    CircuitBreakdown magnetic_breakdown(const UnitCellGeometry &geom, double c_var)
    {
        check_inputs(geom, Side::Magnetic, c_var);
        CircuitBreakdown b;
        b.L_loop = loop_inductance(geom);
        b.gap_factor = 1.0 - geom.g / (2.0 * kPi * geom.R);
        gap_capacitances(geom, b);
        b.params.side = Side::Magnetic;
        b.params.L = b.gap_factor * b.L_loop;
        b.params.C = 1.0 / (1.0 / (b.C_gap + b.C_surf) + 1.0 / c_var);
        return b;
    }

    CircuitBreakdown electric_breakdown(const UnitCellGeometry &geom, double c_var)
    {
        check_inputs(geom, Side::Electric, c_var);
        CircuitBreakdown b;
        b.L_loop = loop_inductance(geom);
        b.gap_factor = 1.0 - geom.g / (2.0 * kPi * geom.R);
        b.L_curve = b.gap_factor * b.L_loop / 2.0;
        b.L_strip = strip_inductance(2.0 * geom.R, geom.w);
        gap_capacitances(geom, b);
        b.params.side = Side::Electric;
        b.params.L = b.L_curve / 2.0 + b.L_strip;
        // Two gaps in series with each other, the pair in series with the varactor.
        b.params.C = 1.0 / (1.0 / (2.0 * (b.C_gap + b.C_surf)) + 1.0 / c_var);
        return b;
    }

    CircuitParams magnetic_circuit(const UnitCellGeometry &geom, double c_var)
    {
        return magnetic_breakdown(geom, c_var).params;
    }

    CircuitParams electric_circuit(const UnitCellGeometry &geom, double c_var)
    {
        return electric_breakdown(geom, c_var).params;
    }

    double resonant_frequency(const CircuitParams &p)
    {
        if (!(p.L > 0.0) || !(p.C > 0.0))
            throw std::invalid_argument("resonant_frequency: L and C must be positive");
        return 1.0 / (2.0 * kPi * std::sqrt(p.L * p.C));
    }

    SurfaceImmittance surface_immittance(double f_op, const CircuitParams &elec, const CircuitParams &mag,
                                         ImpedanceFormula mode)
    {
        if (!(f_op > 0.0))
            throw std::invalid_argument("surface_immittance: f_op must be positive");
        const double om = 2.0 * kPi * f_op;
        SurfaceImmittance s;
        if (mode == ImpedanceFormula::AsTypeset)
        {
            s.z_e = cplx(0.0, (om * elec.C - 1.0) / (om * om * elec.L * elec.C));
            s.y_m = cplx(0.0, (1.0 - om * om * mag.L * mag.C) / (om * mag.C));
            return s;
        }
        s.z_e = cplx(0.0, om * elec.L - 1.0 / (om * elec.C));
        const double xl = om * mag.L;
        const double x = xl - 1.0 / (om * mag.C);
        // Reactance cancelled to rounding level: report the pole instead of dividing.
        if (std::abs(x) <= 64.0 * std::numeric_limits<double>::epsilon() * xl)
        {
            s.y_m = cplx(0.0, 0.0);
            s.y_m_pole = true;
            return s;
        }
        s.y_m = cplx(0.0, -1.0 / x);
        return s;
    }

    ScatterCoefficient scatter_coefficients(const SurfaceImmittance &imm, double freq)
    {
        ScatterCoefficient out;
        out.freq = freq;
        const double eta = imm.eta;
        const cplx ze_n = imm.z_e / eta;
        if (imm.y_m_pole)
        {
            // Limit y_m -> infinity of the general expressions.
            const cplx d = 2.0 + ze_n;
            if (std::abs(d) < 1e-30)
                throw singularity_error("scatter_coefficients: singular denominator at pole");
            out.t_coef = -ze_n / d;
            out.gamma_coef = -2.0 / d;
            return out;
        }
        const cplx ym_n = imm.y_m * eta;
        const cplx den = (2.0 + ym_n) * (2.0 + ze_n);
        if (std::abs(den) < 1e-30)
            throw singularity_error("scatter_coefficients: singular denominator");
        out.t_coef = (4.0 - imm.y_m * imm.z_e) / den;
        out.gamma_coef = 2.0 * (ze_n - ym_n) / den;
        return out;
    }

    ScatterCoefficient cell_response(const CellConfig &cell, double freq, double u_m, double u_e)
    {
        const CircuitParams mag = magnetic_circuit(cell.magnetic, varactor_capacitance(cell.varactor, u_m));
        const CircuitParams ele = electric_circuit(cell.electric, varactor_capacitance(cell.varactor, u_e));
        ScatterCoefficient sc = scatter_coefficients(surface_immittance(freq, ele, mag, cell.formula), freq);
        if (cell.insertion_loss_db != 0.0)
        {
            const double a = std::pow(10.0, -cell.insertion_loss_db / 20.0);
            sc.t_coef *= a;
            sc.gamma_coef *= a;
        }
        return sc;
    }

    double side_resonance(const UnitCellGeometry &geom, const VaractorModel &varactor, double bias)
    {
        const double cv = varactor_capacitance(varactor, bias);
        return resonant_frequency(geom.side == Side::Magnetic ? magnetic_circuit(geom, cv)
                                                              : electric_circuit(geom, cv));
    }

    double calibrate_radius(const UnitCellGeometry &geom, const VaractorModel &varactor, double bias,
                            double f_target, double r_lo, double r_hi)
    {
        UnitCellGeometry g = geom;
        auto f_at = [&](double R) {
            g.R = R;
            return side_resonance(g, varactor, bias);
        };
        // Resonance falls with R; require a bracket.
        if (!(f_at(r_lo) > f_target && f_at(r_hi) < f_target))
            throw std::domain_error("calibrate_radius: target frequency not bracketed by [r_lo, r_hi]");
        for (int it = 0; it < 200 && r_hi - r_lo > 1e-18; ++it)
        {
            const double mid = 0.5 * (r_lo + r_hi);
            if (f_at(mid) > f_target)
                r_lo = mid;
            else
                r_hi = mid;
        }
        return 0.5 * (r_lo + r_hi);
    }
}
