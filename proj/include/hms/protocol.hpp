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

#ifndef hms_protocol_H
#define hms_protocol_H

#include "hms/link_budget.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace hms
{
    enum class NodeRole
    {
        ENodeB,
        Surface,
        UE
    };

    const char *role_name(NodeRole r);

    // Evenly spaced angles over [-span, span], sorted. n = 1 gives broadside.
    std::vector<double> make_codebook(int n, double span_deg);

    inline double codebook_step(int n, double span_deg) { return n > 1 ? 2.0 * span_deg / double(n - 1) : 0.0; }

    // A beam pointed at angle_deg whose main lobe is widened to cover width_deg (0 = narrowest).
    struct BeamSpec
    {
        double angle_deg = 0.0;
        double width_deg = 0.0;
    };

    // One or two arms. Two arms split the surface columns into contiguous halves.
    struct SurfaceBeam
    {
        std::vector<BeamSpec> arms;
    };

    struct ChannelParams
    {
        SurfaceArray array;
        double element_q = 0.5611;
        RadioParams radio; // p_t, frequency and noise floor; g_t and g_r are replaced by the node arrays
        int enodeb_elements = 16;
        int ue_elements = 16;
        double d_enodeb_surface = 6.3; // m
        double d_surface_ue = 3.0;     // m
        Mode geometry_mode = Mode::Lens; // mode the surface must be in for the relay path to exist
        double truth_enodeb_deg = 12.0;   // departure at the ENodeB
        double truth_incident_deg = -20.0; // arrival at the surface
        double truth_surface_deg = 25.0;   // departure from the surface
        double truth_ue_deg = -8.0;        // arrival at the UE
        bool surface_enabled = true;
        bool ideal_surface = false; // continuous phases instead of table entries

        // Optional direct ENodeB-UE path, disabled when direct_distance <= 0.
        double direct_distance = 0.0;
        double direct_loss_db = 40.0;
        double direct_enodeb_deg = 0.0;
        double direct_ue_deg = 0.0;

        void validate() const;
    };

    // Deterministic probe SNR from the surface far-field model and uniform linear arrays
    // (half-wavelength, isotropic elements) at both ends.
    class ProtocolChannel
    {
    public:
        ProtocolChannel(ChannelParams params, PhaseLookupTable lens, PhaseLookupTable mirror);

        const ChannelParams &params() const { return p_; }

        double snr_db(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode surface_mode,
                      const BeamSpec &ue) const;

        // Same alignment with the UE transmitting and the ENodeB receiving.
        double uplink_snr_db(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode surface_mode,
                             const BeamSpec &ue) const;

        // Narrow beams on the ground-truth angles.
        double oracle_snr_db() const;

        BeamCommand surface_command(const SurfaceBeam &beam, Mode mode) const;

    private:
        ChannelParams p_;
        PhaseLookupTable lens_;
        PhaseLookupTable mirror_;
        // Relay power (dBm, unit node gains) per surface beam. Single-threaded use only.
        mutable std::map<std::tuple<double, double, double, double, int>, double> cache_;

        double relay_dbm(const SurfaceBeam &surface, Mode mode, bool uplink) const;
        double total_snr(const BeamSpec &enodeb, const SurfaceBeam &surface, Mode mode, const BeamSpec &ue,
                         bool uplink) const;
    };

    // Gain (dBi) of an n-element half-wavelength array steered by beam, seen from truth_deg.
    // Wide beams use the leading sub-array whose half-power width matches width_deg.
    double ula_gain_dbi(int elements, const BeamSpec &beam, double truth_deg);

    struct ControlMessage
    {
        std::uint64_t seq = 0;
        NodeRole from = NodeRole::UE;
        NodeRole to = NodeRole::Surface;
        std::string kind; // "set_mode" or "set_beam"
        Mode mode = Mode::Lens;
        SurfaceBeam beam;
    };

    struct ProbeRecord
    {
        std::uint64_t index = 0;
        std::string stage;
        double enodeb_deg = 0.0;
        std::vector<double> surface_deg;
        double ue_deg = 0.0;
        double snr_db = 0.0;
    };

    struct AlignmentResult
    {
        std::string procedure;
        double enodeb_deg = 0.0;
        double surface_deg = 0.0;
        double ue_deg = 0.0;
        // Codebook spacing per leg; 0 marks a leg that was held fixed.
        double enodeb_step_deg = 0.0;
        double surface_step_deg = 0.0;
        double ue_step_deg = 0.0;
        std::uint64_t probes_used = 0;
        double snr_db = -std::numeric_limits<double>::infinity(); // noiseless, narrow beams
        double probe_snr_db = -std::numeric_limits<double>::infinity(); // best reported during the search
        double oracle_snr_db = -std::numeric_limits<double>::infinity();
        bool detected = false;
        bool success = false;
        bool reverted = false; // refinement lost the peak and fell back to the coarse result
        bool fallback = false; // multi-arm search gave up and swept exhaustively
    };

    struct ProtocolOptions
    {
        double detect_snr_db = 10.0;
        double tolerance_deg = 3.0;
        double revert_drop_db = 3.0;
        double codebook_span_deg = 60.0;
        int refine_beams = 5;
        double noise_sigma_db = 0.0;
        double ambiguity_db = 2.0; // multi-arm: halves closer than this keep the centre of the region
    };

    // Surface node state. Its mode is only writable through a UE control message.
    class SurfaceNode
    {
    public:
        Mode mode() const { return mode_; }
        const SurfaceBeam &beam() const { return beam_; }
        void deliver(const ControlMessage &msg);

    private:
        Mode mode_ = Mode::Mirror;
        SurfaceBeam beam_;
    };

    class BeamSession
    {
    public:
        BeamSession(const ProtocolChannel &channel, ProtocolOptions options, std::uint64_t seed = 0);

        // UE-issued control; the only path that changes the surface mode.
        void ue_set_mode(Mode mode);

        AlignmentResult cold_start(int n_e, int n_w, int n_u);
        AlignmentResult steady_state(double enodeb_deg, int n_w, int n_u);
        AlignmentResult refine(const AlignmentResult &coarse, int levels);
        AlignmentResult uplink_from_downlink(const AlignmentResult &downlink) const;

        // Bisection of the surface codebook with two-armed sector probes, then surface-leg refinement.
        // The ENodeB and UE beams are held at the given angles.
        AlignmentResult multiarm(int n_w, double enodeb_deg, double ue_deg, int refine_levels);

        const std::vector<ProbeRecord> &probes() const { return probes_; }
        const std::vector<ControlMessage> &messages() const { return messages_; }
        const SurfaceNode &surface() const { return surface_; }
        const ProtocolOptions &options() const { return opt_; }

    private:
        const ProtocolChannel &ch_;
        ProtocolOptions opt_;
        std::mt19937_64 rng_;
        SurfaceNode surface_;
        std::vector<ProbeRecord> probes_;
        std::vector<ControlMessage> messages_;
        std::uint64_t seq_ = 0;

        void send(ControlMessage msg);
        void ue_set_beam(const SurfaceBeam &beam);
        double probe(const std::string &stage, const BeamSpec &e, const SurfaceBeam &w, const BeamSpec &u);
        void finish(AlignmentResult &r) const;
        AlignmentResult exhaustive(const std::string &name, const std::vector<double> &ce,
                                   const std::vector<double> &cw, const std::vector<double> &cu, double we,
                                   double ww, double wu);
    };
}

#endif
