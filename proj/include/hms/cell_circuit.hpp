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

#ifndef hms_cell_circuit_H
#define hms_cell_circuit_H

#include "hms/common.hpp"

namespace hms
{
    enum class Side
    {
        Magnetic,
        Electric
    };

    // Physical loop parameters of one meta-atom side. Lengths in metres.
    struct UnitCellGeometry
    {
        double R = 0.0;     // mean loop radius
        double w = 0.0;     // trace width
        double g = 0.0;     // gap length
        double t = 0.0;     // copper thickness
        double eps_r = 1.0; // substrate relative permittivity
        Side side = Side::Magnetic;

        // Throws std::invalid_argument on non-positive lengths, g >= 2 pi R or eps_r < 1.
        void validate() const;
    };

    // Junction capacitance law C(V) = c_j0 / (1 + V/phi_j)^gamma.
    struct VaractorModel
    {
        double c_j0 = 0.3e-12; // F
        double phi_j = 1.5;    // V
        double gamma = 2.5;
        double v_min = 0.0; // V
        double v_max = 10.0; // V

        void validate() const;
    };

    struct CircuitParams
    {
        double L = 0.0; // H
        double C = 0.0; // F
        Side side = Side::Magnetic;
    };

    // Intermediate quantities of the circuit model, kept for reporting and tests.
    struct CircuitBreakdown
    {
        double eps_eff = 0.0;
        double L_loop = 0.0;
        double L_curve = 0.0; // electric side only
        double L_strip = 0.0; // electric side only
        double C_gap = 0.0;
        double C_surf = 0.0;
        double gap_factor = 0.0; // 1 - g/(2 pi R)
        CircuitParams params;
    };

    enum class ImpedanceFormula
    {
        Canonical,   // series-LC impedance and its admittance dual
        AsTypeset // expressions as typeset in the source derivation, for audit only
    };

    // Sheet immittance pair. A magnetic series resonance is carried as a tagged pole.
    struct SurfaceImmittance
    {
        cplx z_e{0.0, 0.0}; // Ohm
        cplx y_m{0.0, 0.0}; // S, meaningless when y_m_pole is set
        double eta = kEta0;
        bool y_m_pole = false;
    };

    struct ScatterCoefficient
    {
        cplx t_coef{1.0, 0.0};
        cplx gamma_coef{0.0, 0.0};
        double freq = 0.0; // Hz
    };

    // Throws std::out_of_range outside [v_min, v_max].
    double varactor_capacitance(const VaractorModel &model, double bias);

    double effective_permittivity(double eps_r, double t, double w);

    // Thin-strip self inductance of a strip of length l and width w.
    double strip_inductance(double l, double w);

    CircuitBreakdown magnetic_breakdown(const UnitCellGeometry &geom, double c_var);
    CircuitBreakdown electric_breakdown(const UnitCellGeometry &geom, double c_var);
    CircuitParams magnetic_circuit(const UnitCellGeometry &geom, double c_var);
    CircuitParams electric_circuit(const UnitCellGeometry &geom, double c_var);

    double resonant_frequency(const CircuitParams &params);

    SurfaceImmittance surface_immittance(double f_op, const CircuitParams &elec, const CircuitParams &mag,
                                         ImpedanceFormula mode = ImpedanceFormula::Canonical);

    // Throws singularity_error when the common denominator falls below 1e-30.
    ScatterCoefficient scatter_coefficients(const SurfaceImmittance &imm, double freq);

    // Complete unit cell: both sides, shared varactor model, optional scalar insertion loss.
    struct CellConfig
    {
        UnitCellGeometry magnetic;
        UnitCellGeometry electric;
        VaractorModel varactor;
        ImpedanceFormula formula = ImpedanceFormula::Canonical;
        double insertion_loss_db = 0.0;
    };

    ScatterCoefficient cell_response(const CellConfig &cell, double freq, double u_m, double u_e);

    // Bisection on R so that the side resonates at f_target for the given bias.
    // The remaining geometry fields are taken from `geom`.
    double calibrate_radius(const UnitCellGeometry &geom, const VaractorModel &varactor, double bias,
                            double f_target, double r_lo = 0.1e-3, double r_hi = 5e-3);

    double side_resonance(const UnitCellGeometry &geom, const VaractorModel &varactor, double bias);
}

#endif
