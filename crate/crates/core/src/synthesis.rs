//! Side-lobe-level minimization over element amplitudes.
//!
//! A decision vector is expanded into an excitation matrix (optionally
//! mirrored from one quadrant and tapered), the configured cut is sampled,
//! and the side lobe level of that cut is the objective.

use crate::array::{
    compute_sll, evaluate_cut, locate_main_lobe, AngleConvention, ArrayError, ArrayGeometry,
    CutEvaluator, ExcitationMatrix, LobeInterval, PatternCut, ThetaGrid,
};
use crate::cuckoo::{
    run_csa_with, Bounds, CsaConfig, CsaError, Evaluator, Objective, ObjectiveError, RunResult,
    Sequential,
};

/// Objective assigned to candidates whose pattern cannot be measured.
pub const DEGENERATE_SENTINEL_DB: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthesisError {
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(&'static str),
    #[error("decision vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Array(#[from] ArrayError),
    #[error(transparent)]
    Csa(#[from] CsaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Symmetry {
    /// Every element is a free variable.
    None,
    /// One quadrant is optimized and mirrored across both axes.
    #[default]
    Quadrant,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SynthesisSpec {
    pub geometry: ArrayGeometry,
    pub cut_phi_deg: f64,
    pub theta_grid: ThetaGrid,
    pub convention: AngleConvention,
    pub symmetry: Symmetry,
    /// Force amplitudes to be non-increasing away from the array center.
    pub taper_monotone: bool,
    pub amplitude_bounds: (f64, f64),
    pub csa: CsaConfig,
}

impl SynthesisSpec {
    pub fn new(geometry: ArrayGeometry) -> Self {
        Self {
            geometry,
            cut_phi_deg: 0.0,
            theta_grid: ThetaGrid::default(),
            convention: AngleConvention::default(),
            symmetry: Symmetry::default(),
            taper_monotone: false,
            amplitude_bounds: (0.0, 1.0),
            csa: CsaConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let (lower, upper) = self.amplitude_bounds;
        if !(lower.is_finite() && upper.is_finite() && 0.0 <= lower && lower < upper) {
            return Err(SynthesisError::InvalidSpec("amplitude bounds must satisfy 0 <= lower < upper"));
        }
        if !self.cut_phi_deg.is_finite() {
            return Err(SynthesisError::InvalidSpec("cut phi must be finite"));
        }
        self.theta_grid.validate()?;
        self.csa.validate()?;
        Ok(())
    }

    fn quadrant_shape(&self) -> (usize, usize) {
        (
            self.geometry.m_count().div_ceil(2),
            self.geometry.n_count().div_ceil(2),
        )
    }
}

pub fn decision_dimension(spec: &SynthesisSpec) -> usize {
    match spec.symmetry {
        Symmetry::None => spec.geometry.element_count(),
        Symmetry::Quadrant => {
            let (qm, qn) = spec.quadrant_shape();
            qm * qn
        }
    }
}

/// Distance of `index` from the center of a line of `len` elements; both
/// middle elements of an even line sit at distance 0.
fn distance_from_center(index: usize, len: usize) -> usize {
    (2 * index + 1).abs_diff(len) / 2
}

/// Running minimum walking outward from the middle of `line`.
fn cummin_outward(line: &mut [f64]) {
    let len = line.len();
    if len < 2 {
        return;
    }
    for i in len / 2 + 1..len {
        line[i] = line[i].min(line[i - 1]);
    }
    for i in (0..(len - 1) / 2).rev() {
        line[i] = line[i].min(line[i + 1]);
    }
}

/// Turns a decision vector into the excitation it encodes.
///
/// Quadrant vectors are laid out row-major from the center outward: entry
/// `i * ceil(N/2) + j` is the amplitude `i` rows and `j` columns away from the
/// middle. Full vectors are the row-major `M x N` matrix.
pub fn expand_excitation(vector: &[f64], spec: &SynthesisSpec) -> Result<ExcitationMatrix, SynthesisError> {
    let expected = decision_dimension(spec);
    if vector.len() != expected {
        return Err(SynthesisError::LengthMismatch {
            expected,
            found: vector.len(),
        });
    }
    let m_count = spec.geometry.m_count();
    let n_count = spec.geometry.n_count();

    let amplitudes = match spec.symmetry {
        Symmetry::None => {
            let mut grid = vector.to_vec();
            if spec.taper_monotone {
                let mut column = alloc::vec![0.0; m_count];
                for n in 0..n_count {
                    for m in 0..m_count {
                        column[m] = grid[m * n_count + n];
                    }
                    cummin_outward(&mut column);
                    for m in 0..m_count {
                        grid[m * n_count + n] = column[m];
                    }
                }
                for row in grid.chunks_exact_mut(n_count) {
                    cummin_outward(row);
                }
            }
            grid
        }
        Symmetry::Quadrant => {
            let (qm, qn) = spec.quadrant_shape();
            let mut quadrant = vector.to_vec();
            if spec.taper_monotone {
                // Quadrant indices already run outward, so a prefix minimum suffices.
                for i in 1..qm {
                    for j in 0..qn {
                        quadrant[i * qn + j] = quadrant[i * qn + j].min(quadrant[(i - 1) * qn + j]);
                    }
                }
                for i in 0..qm {
                    for j in 1..qn {
                        quadrant[i * qn + j] = quadrant[i * qn + j].min(quadrant[i * qn + j - 1]);
                    }
                }
            }
            (0..m_count)
                .flat_map(|m| {
                    let i = distance_from_center(m, m_count);
                    let quadrant = &quadrant;
                    (0..n_count).map(move |n| quadrant[i * qn + distance_from_center(n, n_count)])
                })
                .collect()
        }
    };
    Ok(ExcitationMatrix::new(m_count, n_count, amplitudes)?)
}

/// Everything measured for one decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub excitation: ExcitationMatrix,
    pub cut: PatternCut,
    pub main_lobe: LobeInterval,
    pub sll_db: f64,
}

/// Side lobe level of the configured cut as a function of the decision vector.
#[derive(Debug, Clone)]
pub struct SllObjective {
    spec: SynthesisSpec,
    cut: CutEvaluator,
}

impl SllObjective {
    pub fn spec(&self) -> &SynthesisSpec {
        &self.spec
    }

    pub fn measure(&self, vector: &[f64]) -> Result<Measurement, SynthesisError> {
        let excitation = expand_excitation(vector, &self.spec)?;
        let cut = self.cut.cut(&excitation)?;
        let main_lobe = locate_main_lobe(&cut)?;
        let sll_db = compute_sll(&cut, &main_lobe)?;
        Ok(Measurement {
            excitation,
            cut,
            main_lobe,
            sll_db,
        })
    }

    /// SLL in dB, or [`DEGENERATE_SENTINEL_DB`] when it cannot be measured.
    pub fn value(&self, vector: &[f64]) -> f64 {
        self.measure(vector)
            .map_or(DEGENERATE_SENTINEL_DB, |m| m.sll_db)
    }
}

impl Objective for SllObjective {
    fn evaluate(&self, position: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self.value(position))
    }
}

pub fn build_objective(spec: &SynthesisSpec) -> Result<SllObjective, SynthesisError> {
    spec.validate()?;
    let theta = spec.theta_grid.samples();
    let cut = CutEvaluator::new(&spec.geometry, spec.cut_phi_deg, &theta, spec.convention)?;
    Ok(SllObjective {
        spec: spec.clone(),
        cut,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SynthesisResult {
    pub spec: SynthesisSpec,
    pub best_excitation: ExcitationMatrix,
    pub sll_db: f64,
    pub main_lobe: LobeInterval,
    pub run: RunResult,
}

impl SynthesisResult {
    /// The winning excitation's pattern on the configured cut.
    pub fn pattern(&self) -> Result<PatternCut, ArrayError> {
        evaluate_cut(
            &self.spec.geometry,
            &self.best_excitation,
            self.spec.cut_phi_deg,
            &self.spec.theta_grid.samples(),
            self.spec.convention,
        )
    }
}

pub fn synthesize(spec: &SynthesisSpec) -> Result<SynthesisResult, SynthesisError> {
    synthesize_with(spec, &Sequential)
}

pub fn synthesize_with<E: Evaluator + ?Sized>(
    spec: &SynthesisSpec,
    evaluator: &E,
) -> Result<SynthesisResult, SynthesisError> {
    let objective = build_objective(spec)?;
    let (lower, upper) = spec.amplitude_bounds;
    let bounds = Bounds::uniform(decision_dimension(spec), lower, upper)?;
    let run = run_csa_with(&spec.csa, &bounds, &objective, evaluator)?;

    // Measure the winner from scratch rather than trusting the cached objective.
    let best_excitation = expand_excitation(&run.best_position, spec)?;
    let cut = evaluate_cut(
        &spec.geometry,
        &best_excitation,
        spec.cut_phi_deg,
        &spec.theta_grid.samples(),
        spec.convention,
    )?;
    let main_lobe = locate_main_lobe(&cut)?;
    let sll_db = compute_sll(&cut, &main_lobe)?;

    Ok(SynthesisResult {
        spec: spec.clone(),
        best_excitation,
        sll_db,
        main_lobe,
        run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn spec(m: usize, n: usize, symmetry: Symmetry) -> SynthesisSpec {
        SynthesisSpec {
            symmetry,
            ..SynthesisSpec::new(ArrayGeometry::new(m, n).unwrap())
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(decision_dimension(&spec(11, 11, Symmetry::Quadrant)), 36);
        assert_eq!(decision_dimension(&spec(16, 16, Symmetry::Quadrant)), 64);
        assert_eq!(decision_dimension(&spec(20, 20, Symmetry::None)), 400);
        assert_eq!(decision_dimension(&spec(5, 2, Symmetry::Quadrant)), 3);
    }

    #[test]
    fn center_distances() {
        let odd: Vec<usize> = (0..5).map(|i| distance_from_center(i, 5)).collect();
        assert_eq!(odd, vec![2, 1, 0, 1, 2]);
        let even: Vec<usize> = (0..4).map(|i| distance_from_center(i, 4)).collect();
        assert_eq!(even, vec![1, 0, 0, 1]);
        assert_eq!(distance_from_center(0, 1), 0);
    }

    #[test]
    fn two_by_two_single_quadrant_value() {
        let e = expand_excitation(&[0.7], &spec(2, 2, Symmetry::Quadrant)).unwrap();
        assert_eq!(e.as_slice(), &[0.7; 4]);
    }

    #[test]
    fn three_by_three_quadrant_layout() {
        let (a, b, c, d) = (0.9, 0.6, 0.5, 0.2);
        let e = expand_excitation(&[a, b, c, d], &spec(3, 3, Symmetry::Quadrant)).unwrap();
        assert_eq!(e.as_slice(), &[d, c, d, b, a, b, d, c, d]);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert_eq!(
            expand_excitation(&[0.1, 0.2], &spec(3, 3, Symmetry::Quadrant)),
            Err(SynthesisError::LengthMismatch { expected: 4, found: 2 })
        );
    }

    #[test]
    fn taper_leaves_monotone_line_unchanged() {
        let s = SynthesisSpec {
            taper_monotone: true,
            ..spec(4, 1, Symmetry::None)
        };
        let e = expand_excitation(&[0.5, 0.9, 0.9, 0.5], &s).unwrap();
        assert_eq!(e.as_slice(), &[0.5, 0.9, 0.9, 0.5]);
    }

    #[test]
    fn taper_clips_outer_elements() {
        let s = SynthesisSpec {
            taper_monotone: true,
            ..spec(5, 1, Symmetry::None)
        };
        let e = expand_excitation(&[1.0, 0.3, 0.6, 0.8, 0.2], &s).unwrap();
        assert_eq!(e.as_slice(), &[0.3, 0.3, 0.6, 0.6, 0.2]);

        let q = SynthesisSpec {
            taper_monotone: true,
            ..spec(3, 3, Symmetry::Quadrant)
        };
        // center 0.4 caps everything
        let e = expand_excitation(&[0.4, 0.9, 0.8, 0.1], &q).unwrap();
        assert_eq!(e.as_slice(), &[0.1, 0.4, 0.1, 0.4, 0.4, 0.4, 0.1, 0.4, 0.1]);
    }

    #[test]
    fn zero_vector_maps_to_sentinel() {
        let s = spec(16, 16, Symmetry::Quadrant);
        let objective = build_objective(&s).unwrap();
        assert_eq!(objective.value(&[0.0; 64]), DEGENERATE_SENTINEL_DB);
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(4, 4, Symmetry::Quadrant);
        s.amplitude_bounds = (0.5, 0.5);
        assert!(s.validate().is_err());
        s.amplitude_bounds = (-0.1, 1.0);
        assert!(s.validate().is_err());
        s.amplitude_bounds = (0.0, 2.0);
        assert!(s.validate().is_ok());
        s.theta_grid.points = 2;
        assert!(build_objective(&s).is_err());
    }

    #[test]
    fn tiny_budget_still_produces_a_result() {
        let mut s = spec(4, 4, Symmetry::Quadrant);
        s.csa.max_iterations = 1;
        s.csa.population = 2;
        let r = synthesize(&s).unwrap();
        assert_eq!(r.run.best_history.len(), 1);
        assert_eq!(r.sll_db, r.run.best_objective);
    }
}
