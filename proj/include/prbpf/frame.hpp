#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "prbpf/camera.hpp"
#include "prbpf/depth.hpp"

namespace prbpf {

/// External 2D detection, optionally with a full pose estimate attached
/// (detector output ingested from the sequence manifest).
struct Detection {
    std::array<double, 4> box{0, 0, 0, 0};  // u0, v0, u1, v1 in pixels
    std::optional<Pose> pose;
};

/// One time step's observation. For synthetic sequences the encoder input is
/// described by the ground-truth pose plus a per-frame noise seed; for replay
/// of real data a precomputed embedding is attached instead.
struct Frame {
    int index = 0;
    CameraIntrinsics intrinsics;
    bool object_present = true;
    Pose gt_pose;
    std::uint64_t noise_seed = 0;
    std::optional<DepthPatch> depth;
    std::optional<Detection> detection;
    std::optional<Eigen::VectorXf> embedding;
};

}  // namespace prbpf
