//! Diagnostics and their JSON documents.

use serde::{Deserialize, Serialize};

use crate::cmv::CmvProfile;

/// Diagnostics collected by a reduction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// `‖QᴴMQ − T‖_F` for the matrix the reduction targets.
    pub residual: f64,
    /// `‖QᴴQ − I‖_F`.
    pub unitarity: f64,
    /// Lanczos step at which the candidate block vanished, if it did.
    pub breakdown_step: Option<usize>,
    /// Coupling norms observed at every breakdown (one per restart for the CMV reduction).
    pub breakdown_norms: Vec<f64>,
    /// `n·u·‖U‖_F` of the input.
    pub deflation_threshold: f64,
    pub steps: usize,
    /// Largest entry outside the target profile before it was set to zero.
    pub max_off_profile: f64,
    /// Largest entry between segments before it was set to zero.
    pub max_cross_segment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentJson {
    pub start: usize,
    pub size: usize,
    pub block_sizes: Vec<usize>,
}

/// JSON document emitted for a CMV-like reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmvReportJson {
    pub n: usize,
    pub segments: Vec<SegmentJson>,
    pub breakdown_norms: Vec<f64>,
    pub threshold: f64,
    pub residual: f64,
    pub unitarity: f64,
    /// Largest entry outside the profile before it was set to zero.
    pub max_off_profile: f64,
}

impl CmvReportJson {
    pub fn new(profile: &CmvProfile, report: &ReductionReport) -> Self {
        let segments = profile
            .segments()
            .iter()
            .enumerate()
            .map(|(k, seg)| SegmentJson {
                start: seg.start,
                size: seg.len(),
                block_sizes: profile
                    .segment_blocks(k)
                    .map(|b| profile.block_sizes[b])
                    .collect(),
            })
            .collect();
        Self {
            n: profile.n,
            segments,
            breakdown_norms: report.breakdown_norms.clone(),
            threshold: report.deflation_threshold,
            residual: report.residual,
            unitarity: report.unitarity,
            max_off_profile: report.max_off_profile,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for ComplexJson {
    fn from(z: num_complex::Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflationEvent {
    pub index: usize,
    pub step: usize,
}

/// JSON document emitted by the eigensolver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReportJson {
    pub steps_total: usize,
    pub deflations: Vec<DeflationEvent>,
    pub max_profile_violation: f64,
    pub eigenvalues: Vec<ComplexJson>,
    pub converged: bool,
}
