#pragma once

#include <stdexcept>
#include <string>

namespace panolayout {

// Failure taxonomy shared across the pipeline. Batch drivers catch
// PipelineError per item and keep going; anything else is a bug.
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// alignment: no orthogonal vanishing-direction triple with enough votes.
struct FrameNotFound : PipelineError {
  using PipelineError::PipelineError;
};

// fit-equirect: corner-map peak extraction yielded too few corner columns.
struct TooFewCorners : PipelineError {
  using PipelineError::PipelineError;
};

// fit-equirect: initial layout could not be assembled from the candidates.
struct InfeasibleInit : PipelineError {
  using PipelineError::PipelineError;
};

// Wall-chain assembly or validation produced a non-layout (self-intersection,
// camera outside, contradictory walls).
struct InfeasibleLayout : PipelineError {
  using PipelineError::PipelineError;
};

// predict-stub: rejection sampler hit its attempt budget.
struct SamplingExhausted : PipelineError {
  using PipelineError::PipelineError;
};

// fit-ceiling: layout height does not clear the camera-to-ceiling reference.
struct DegenerateHeight : PipelineError {
  using PipelineError::PipelineError;
};

// fit-ceiling: thresholded fuse has no foreground component.
struct EmptyRegion : PipelineError {
  using PipelineError::PipelineError;
};

// fit-ceiling: traced polyline is dominated by diagonal edges.
struct NonRectilinear : PipelineError {
  using PipelineError::PipelineError;
};

// metrics: corner sets of unequal cardinality (callers route these to the
// corner-count confusion matrix instead).
struct CountMismatch : PipelineError {
  using PipelineError::PipelineError;
};

// CLI and file-format problems; mapped to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace panolayout
