#pragma once

#include "prbpf/codebook.hpp"
#include "prbpf/encoder.hpp"
#include "prbpf/frame.hpp"

namespace prbpf {

/// Score assigned to every bin of a starved particle (hypothesis off-image or
/// nearly so). The minimum possible cosine keeps starved particles from ever
/// defining the shared likelihood center.
inline constexpr float kStarvedScore = -1.0f;

struct RotationObservation {
    SimilarityScores scores;
    Embedding code;
    bool starved = false;
};

/// Similarity of the RoI implied by a translation hypothesis against the
/// whole codebook. A hypothesis behind the camera or whose RoI overlaps the
/// image by less than `min_overlap` yields sentinel minimal scores instead of
/// an error. Conversion to likelihoods happens jointly across particles in
/// scores_to_likelihoods.
inline RotationObservation rotation_likelihood(const Frame& frame, const Translation& t,
                                               const Codebook& cb, const Encoder& encoder,
                                               double min_overlap = 0.25, int n_threads = 0) {
    RotationObservation obs;
    if (!(t.z > 0.0)) {
        obs.scores.assign(cb.grid().total(), kStarvedScore);
        obs.starved = true;
        return obs;
    }
    const Roi roi = roi_for_translation(t, frame.intrinsics, cb.z_canonical(),
                                        static_cast<double>(cb.roi_size()));
    if (roi_image_overlap(roi, frame.intrinsics) < min_overlap) {
        obs.scores.assign(cb.grid().total(), kStarvedScore);
        obs.starved = true;
        return obs;
    }
    obs.code = encoder.encode_roi(frame, roi);
    obs.scores = similarity_scores(obs.code, cb, n_threads);
    return obs;
}

/// Translation likelihood P(Z | T): the sum of the (unnormalized) rotation
/// likelihood over all discrete rotations.
inline double translation_likelihood(const RotationDistribution& unnormalized_likelihoods) {
    double s = 0.0;
    for (std::size_t i = 0; i < unnormalized_likelihoods.size(); ++i)
        s += unnormalized_likelihoods[i];
    return s;
}

}  // namespace prbpf
