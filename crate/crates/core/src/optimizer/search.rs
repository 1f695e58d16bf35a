//! The closed-loop search: sampling decision, global quantization table
//! selection, simultaneous per-block zeroing, and best-candidate selection.
//!
//! The search is driven by the perceptual target alone, never by file
//! size: every adjustment produces a candidate JPEG, measured end to end
//! (encode, decode, distance map), and the smallest candidate within the
//! budget wins at the end.

use crate::codec::{
    decode, entropy_encode, fdct_block, quantize_block, rgb_to_yuv, CoeffImage, DecodeError,
    EncodeError, EncodedJpeg, QuantTable, Sampling, YuvPlanes,
};
use crate::image::RgbImage;
use crate::metric::{
    compute_masks, distance_map, distance_map_with_masks, global_distance, opponent_transform,
    DistanceMap, MaskMap, MetricError,
};
use crate::optimizer::plan::{apply_zero_plan, rank_coefficients, ZeroPlan};
use crate::optimizer::tables::{build_table_set, QuantTableSet};

/// Number of tables in the default predefined set.
pub const DEFAULT_TABLE_COUNT: usize = 16;

/// Cap on the per-block raise step during coarse adjustment rounds.
const MAX_RAISE_STEP: u8 = 32;

/// Search tunables.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Perceptual distance budget for the output.
    pub target_distance: f64,
    /// Fraction of the budget the global phase may spend, leaving slack
    /// for local zeroing.
    pub alpha: f64,
    /// Cap on candidate encodes during the global phase.
    pub max_global_candidates: usize,
    /// Cap on local adjustment rounds; 0 skips the local phase.
    pub max_local_iterations: usize,
    /// Permit the 2x2 chroma-subsampled mode to be considered.
    pub allow_yuv420: bool,
    /// Scan the table set linearly instead of binary-searching it, for
    /// content where distance is not monotone in table coarseness.
    pub linear_scan: bool,
}

impl OptimizerConfig {
    pub fn new(target_distance: f64) -> Self {
        Self {
            target_distance,
            alpha: 0.97,
            max_global_candidates: DEFAULT_TABLE_COUNT,
            max_local_iterations: 30,
            allow_yuv420: false,
            linear_scan: false,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if !(self.target_distance > 0.0 && self.target_distance.is_finite()) {
            return Err(OptimizerError::InvalidConfig(
                "target distance must be positive and finite".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(OptimizerError::InvalidConfig(
                "alpha must be in (0, 1)".into(),
            ));
        }
        if self.max_global_candidates < 1 {
            return Err(OptimizerError::InvalidConfig(
                "global candidate cap must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// The distance the global phase must stay under.
    fn global_budget(&self) -> f64 {
        self.alpha * self.target_distance
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OptimizerError {
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("candidate encode failed: {0}")]
    Encode(#[from] EncodeError),

    #[error("candidate failed to decode, encoder and decoder disagree: {0}")]
    Decode(#[from] DecodeError),

    #[error("metric failure: {0}")]
    Metric(#[from] MetricError),

    #[error("no candidates to select from")]
    NoCandidates,
}

/// Where a candidate came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Index into the table set used for the encode.
    pub table_index: usize,
    /// Zero plan applied, if the candidate came from the local phase.
    pub zero_plan: Option<ZeroPlan>,
    pub sampling: Sampling,
}

/// One proposal produced during the search.
#[derive(Debug, Clone)]
pub struct CandidateJpeg {
    pub jpeg: EncodedJpeg,
    /// Perceptual distance from the original, measured through a full
    /// decode of `jpeg`.
    pub distance: f64,
    pub provenance: Provenance,
}

impl CandidateJpeg {
    pub fn size(&self) -> usize {
        self.jpeg.size()
    }
}

/// Outcome of the global phase.
#[derive(Debug)]
pub struct GlobalSelection {
    pub table_index: usize,
    /// Set when even the finest table exceeds the global budget.
    pub infeasible: bool,
    pub candidates: Vec<CandidateJpeg>,
}

/// Final result of [`encode_perceptual`].
#[derive(Debug)]
pub struct PerceptualResult {
    pub best: CandidateJpeg,
    /// No candidate met the target; `best` is the closest miss.
    pub over_budget: bool,
    /// The global phase could not meet its budget even at the finest table.
    pub budget_infeasible: bool,
    pub candidates_evaluated: usize,
    pub local_rounds: usize,
}

/// Unquantized per-block DCT coefficients of one image at one sampling
/// mode. The global phase requantizes these for every table it tries
/// instead of redoing the color transform and DCT.
struct RawDcts {
    width: u32,
    height: u32,
    sampling: Sampling,
    comps: [RawComponent; 3],
}

struct RawComponent {
    blocks_w: usize,
    blocks: Vec<[f64; 64]>,
}

impl RawDcts {
    fn new(img: &RgbImage, sampling: Sampling) -> Self {
        let yuv = rgb_to_yuv(img, sampling);
        let comps = std::array::from_fn(|c| {
            let plane = yuv.plane(c);
            let (pw, ph) = YuvPlanes::plane_dims(yuv.width, yuv.height, sampling, c);
            let (blocks_w, blocks_h) = (pw.div_ceil(8), ph.div_ceil(8));
            let mut blocks = Vec::with_capacity(blocks_w * blocks_h);
            let mut samples = [0.0f64; 64];
            for by in 0..blocks_h {
                for bx in 0..blocks_w {
                    plane.extract_block(bx, by, &mut samples);
                    for s in &mut samples {
                        *s -= 128.0;
                    }
                    blocks.push(fdct_block(&samples));
                }
            }
            RawComponent { blocks_w, blocks }
        });
        Self {
            width: img.width(),
            height: img.height(),
            sampling,
            comps,
        }
    }

    fn quantize(&self, quant: &QuantTable) -> CoeffImage {
        let mut out = CoeffImage::zeroed(self.width, self.height, self.sampling, quant.clone());
        for c in 0..3 {
            debug_assert_eq!(out.components[c].blocks_w, self.comps[c].blocks_w);
            for (dst, src) in out.components[c]
                .blocks
                .iter_mut()
                .zip(self.comps[c].blocks.iter())
            {
                *dst = quantize_block(src, quant.component(c));
            }
        }
        out
    }
}

/// Shared measurement path: every candidate goes through the real encoder
/// and decoder before the metric sees it.
struct Evaluator<'a> {
    original: &'a RgbImage,
    masks: &'a MaskMap,
}

impl Evaluator<'_> {
    fn measure(
        &self,
        coeffs: &CoeffImage,
        table_index: usize,
        zero_plan: Option<ZeroPlan>,
    ) -> Result<(CandidateJpeg, DistanceMap), OptimizerError> {
        let jpeg = entropy_encode(coeffs)?;
        let (_, pixels) = decode(&jpeg.bytes)?;
        let map = distance_map_with_masks(self.original, &pixels, self.masks)?;
        let distance = global_distance(&map);
        let candidate = CandidateJpeg {
            jpeg,
            distance,
            provenance: Provenance {
                table_index,
                zero_plan,
                sampling: coeffs.sampling,
            },
        };
        Ok((candidate, map))
    }
}

/// Decides the chroma sampling mode once, before the global phase:
/// YUV420 is used only when the finest table in YUV420 mode, with no other
/// distortion, already fits the global budget.
pub fn decide_sampling(
    img: &RgbImage,
    set: &QuantTableSet,
    cfg: &OptimizerConfig,
) -> Result<Sampling, OptimizerError> {
    cfg.validate()?;
    if !cfg.allow_yuv420 {
        return Ok(Sampling::Yuv444);
    }
    let raw = RawDcts::new(img, Sampling::Yuv420);
    let coeffs = raw.quantize(set.get(0));
    let jpeg = entropy_encode(&coeffs)?;
    let (_, pixels) = decode(&jpeg.bytes)?;
    let d = global_distance(&distance_map(img, &pixels)?);
    if d <= cfg.global_budget() {
        Ok(Sampling::Yuv420)
    } else {
        Ok(Sampling::Yuv444)
    }
}

/// Selects the coarsest table whose plain encode (no zeroing) stays within
/// `alpha * target_distance`. Every table evaluated emits a candidate.
///
/// By default the ordered set is binary-searched, which assumes distance
/// is monotone in table coarseness; `cfg.linear_scan` falls back to a
/// coarsest-to-finest scan.
pub fn select_global_table(
    img: &RgbImage,
    set: &QuantTableSet,
    cfg: &OptimizerConfig,
    sampling: Sampling,
) -> Result<GlobalSelection, OptimizerError> {
    cfg.validate()?;
    let masks = compute_masks(&opponent_transform(img));
    let raw = RawDcts::new(img, sampling);
    select_global_with(&raw, &masks, img, set, cfg)
}

fn select_global_with(
    raw: &RawDcts,
    masks: &MaskMap,
    img: &RgbImage,
    set: &QuantTableSet,
    cfg: &OptimizerConfig,
) -> Result<GlobalSelection, OptimizerError> {
    let evaluator = Evaluator {
        original: img,
        masks,
    };
    let budget = cfg.global_budget();
    let mut candidates: Vec<CandidateJpeg> = Vec::new();
    let mut measured: Vec<Option<f64>> = vec![None; set.len()];

    let measure = |idx: usize,
                       candidates: &mut Vec<CandidateJpeg>,
                       measured: &mut Vec<Option<f64>>|
     -> Result<f64, OptimizerError> {
        if let Some(d) = measured[idx] {
            return Ok(d);
        }
        let coeffs = raw.quantize(set.get(idx));
        let (candidate, _) = evaluator.measure(&coeffs, idx, None)?;
        let d = candidate.distance;
        candidates.push(candidate);
        measured[idx] = Some(d);
        Ok(d)
    };

    if cfg.linear_scan {
        // Coarsest to finest, first table under budget wins. One
        // evaluation is reserved for the finest table so feasibility is
        // always decided.
        for idx in (1..set.len()).rev() {
            if candidates.len() + 1 >= cfg.max_global_candidates {
                break;
            }
            if measure(idx, &mut candidates, &mut measured)? <= budget {
                return Ok(GlobalSelection {
                    table_index: idx,
                    infeasible: false,
                    candidates,
                });
            }
        }
        let d0 = measure(0, &mut candidates, &mut measured)?;
        return Ok(GlobalSelection {
            table_index: 0,
            infeasible: d0 > budget,
            candidates,
        });
    }

    // Binary search for the rightmost qualifying table. `lo` is only ever
    // advanced to a measured-qualifying index, so the selection stays
    // within budget even if monotonicity is violated somewhere.
    let d0 = measure(0, &mut candidates, &mut measured)?;
    if d0 > budget {
        return Ok(GlobalSelection {
            table_index: 0,
            infeasible: true,
            candidates,
        });
    }
    let (mut lo, mut hi) = (0usize, set.len() - 1);
    while lo < hi && candidates.len() < cfg.max_global_candidates {
        let mid = (lo + hi + 1) / 2;
        if measure(mid, &mut candidates, &mut measured)? <= budget {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(GlobalSelection {
        table_index: lo,
        infeasible: false,
        candidates,
    })
}

/// Per-block adjustment state across rounds.
#[derive(Clone, Copy)]
struct BlockState {
    /// Raise step; doubles while the block stays far under the target.
    step: u8,
    /// Highest zero count this block has measured under the target.
    known_good: u8,
    /// The block has bounced off the threshold: raising it further is
    /// known to overshoot, so it holds at its highest good count.
    settled: bool,
}

impl BlockState {
    fn initial() -> Self {
        Self {
            step: 1,
            known_good: 0,
            settled: false,
        }
    }
}

/// One adjustment round: push blocks under the target toward more zeros,
/// pull blocks at or over it back. The raise step doubles while a block
/// sits far below the target and drops to single steps near it. A block
/// that overshoots jumps back to its last good count and settles there;
/// settling is what lets the plan reach a fixpoint with every block just
/// under the target.
fn adjust_plan(plan: &ZeroPlan, map: &DistanceMap, states: &mut [BlockState], target: f64) -> ZeroPlan {
    let mut next = plan.clone();
    for by in 0..plan.blocks_h {
        for bx in 0..plan.blocks_w {
            let i = by * plan.blocks_w + bx;
            let error = map.get(bx, by);
            let count = plan.get(bx, by);
            let state = &mut states[i];
            if error >= target {
                let fallback = if state.known_good < count {
                    state.known_good
                } else {
                    count.saturating_sub(1)
                };
                next.set(bx, by, fallback);
                state.step = 1;
                // Only a failed single-step raise proves the block is at
                // its highest good count; a failed long jump just resumes
                // refinement from the last good count.
                state.settled = count == fallback.saturating_add(1);
            } else {
                state.known_good = count;
                if !state.settled {
                    let raise = if error < 0.5 * target { state.step } else { 1 };
                    next.set(bx, by, count.saturating_add(raise).min(63));
                    state.step = if error < 0.5 * target {
                        state.step.saturating_mul(2).min(MAX_RAISE_STEP)
                    } else {
                        1
                    };
                }
            }
        }
    }
    next
}

/// Local phase: adjusts the zero counts of all blocks simultaneously,
/// re-encoding and re-measuring after every round. Counts always apply
/// against the pristine `coeffs`, so lowering a count restores the exact
/// original coefficients. Emits one candidate per round plus the
/// zero-plan baseline; stops on the iteration cap or a plan fixpoint.
pub fn local_optimize(
    img: &RgbImage,
    coeffs: &CoeffImage,
    table_index: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<CandidateJpeg>, OptimizerError> {
    cfg.validate()?;
    let masks = compute_masks(&opponent_transform(img));
    local_optimize_with(img, &masks, coeffs, table_index, cfg)
}

fn local_optimize_with(
    img: &RgbImage,
    masks: &MaskMap,
    coeffs: &CoeffImage,
    table_index: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<CandidateJpeg>, OptimizerError> {
    let evaluator = Evaluator {
        original: img,
        masks,
    };
    let order = rank_coefficients(coeffs, masks);
    let (bw, bh) = coeffs.luma_grid_dims();

    let mut plan = ZeroPlan::zeros(bw, bh);
    let mut states = vec![BlockState::initial(); bw * bh];
    let mut candidates = Vec::new();

    // The zero-count baseline equals the global-phase output for this
    // table; it seeds the feedback loop.
    let (candidate, mut map) = evaluator.measure(coeffs, table_index, Some(plan.clone()))?;
    candidates.push(candidate);

    for _round in 0..cfg.max_local_iterations {
        let next = adjust_plan(&plan, &map, &mut states, cfg.target_distance);
        if next == plan {
            break;
        }
        plan = next;
        let zeroed = apply_zero_plan(coeffs, &order, &plan);
        let (candidate, next_map) = evaluator.measure(&zeroed, table_index, Some(plan.clone()))?;
        candidates.push(candidate);
        map = next_map;
    }
    Ok(candidates)
}

/// Picks the smallest candidate within the distance budget; when none
/// qualifies, the closest miss is returned flagged as over budget.
/// Ties keep the earliest candidate.
pub fn select_best(
    candidates: &[CandidateJpeg],
    cfg: &OptimizerConfig,
) -> Result<(CandidateJpeg, bool), OptimizerError> {
    if candidates.is_empty() {
        return Err(OptimizerError::NoCandidates);
    }
    let qualifier = candidates
        .iter()
        .filter(|c| c.distance <= cfg.target_distance)
        .min_by_key(|c| c.size());
    if let Some(best) = qualifier {
        return Ok((best.clone(), false));
    }
    let closest = candidates
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .expect("nonempty");
    Ok((closest.clone(), true))
}

/// Runs the whole pipeline: sampling decision, global table selection,
/// local zeroing, best-candidate selection, and a final independent
/// decode-and-measure of the winner.
pub fn encode_perceptual(
    img: &RgbImage,
    cfg: &OptimizerConfig,
) -> Result<PerceptualResult, OptimizerError> {
    cfg.validate()?;
    let set = build_table_set(DEFAULT_TABLE_COUNT);
    let masks = compute_masks(&opponent_transform(img));

    let sampling = decide_sampling(img, &set, cfg)?;
    let raw = RawDcts::new(img, sampling);

    let global = select_global_with(&raw, &masks, img, &set, cfg)?;
    let pristine = raw.quantize(set.get(global.table_index));
    let local = local_optimize_with(img, &masks, &pristine, global.table_index, cfg)?;
    let local_rounds = local.len().saturating_sub(1);

    let mut candidates = global.candidates;
    candidates.extend(local);
    let total = candidates.len();

    let (mut best, over_budget) = select_best(&candidates, cfg)?;

    // Re-verify the recorded distance through a fresh decode and measure.
    let (_, pixels) = decode(&best.jpeg.bytes)?;
    let verified = global_distance(&distance_map(img, &pixels)?);
    debug_assert_eq!(verified, best.distance);
    best.distance = verified;

    Ok(PerceptualResult {
        best,
        over_budget,
        budget_infeasible: global.infeasible,
        candidates_evaluated: total,
        local_rounds,
    })
}
