//! Planar array factor, pattern cuts, main-lobe bracketing and side lobe level.
//!
//! Elements sit on a regular `M x N` grid in the x-y plane with spacings given
//! in wavelengths. Elements are isotropic and fed in phase, so the far field is
//! the array factor alone. Patterns are always reported peak-normalized in dB.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Samples more than this far below the peak are clamped to it.
pub const DB_FLOOR: f64 = -120.0;

/// Tolerance used when checking that a cut is peak-normalized.
const NORMALIZATION_TOLERANCE_DB: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArrayError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),
    #[error("invalid excitation: {0}")]
    InvalidExcitation(&'static str),
    #[error("excitation is {found_m}x{found_n} but geometry is {expected_m}x{expected_n}")]
    DimensionMismatch {
        expected_m: usize,
        expected_n: usize,
        found_m: usize,
        found_n: usize,
    },
    #[error("excitation is identically zero over the evaluated directions")]
    DegenerateExcitation,
    #[error("invalid direction: {0}")]
    InvalidDirection(&'static str),
    #[error("invalid theta grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid pattern cut: {0}")]
    InvalidCut(&'static str),
    #[error("main lobe [{low_deg}, {high_deg}] lies outside the cut's grid span")]
    LobeOutsideGrid { low_deg: f64, high_deg: f64 },
    #[error("main lobe covers the whole cut, there is no sidelobe region")]
    NoSidelobeRegion,
}

/// How the polar angle enters the phase progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AngleConvention {
    /// `cos(theta)` drives the phase, so an in-phase array peaks at 90 degrees.
    #[default]
    BroadsideAt90,
    /// `sin(theta)` drives the phase, as in the textbook planar form.
    PaperLiteral,
}

impl AngleConvention {
    /// Angles past 90 degrees are folded through `180 - theta`, which is exact
    /// there, so samples mirrored about 90 degrees give projections that are
    /// exact negatives (or equal) and therefore identical magnitudes.
    fn projection(self, theta_deg: f64) -> f64 {
        let folded = if theta_deg > 90.0 { 180.0 - theta_deg } else { theta_deg };
        match self {
            AngleConvention::BroadsideAt90 => {
                let c = if folded == 90.0 { 0.0 } else { libm::cos(folded.to_radians()) };
                if theta_deg > 90.0 {
                    -c
                } else {
                    c
                }
            }
            AngleConvention::PaperLiteral => libm::sin(folded.to_radians()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ArrayGeometry {
    m_count: usize,
    n_count: usize,
    dx_wavelengths: f64,
    dy_wavelengths: f64,
}

impl ArrayGeometry {
    /// Half-wavelength spaced `m_count x n_count` array.
    pub fn new(m_count: usize, n_count: usize) -> Result<Self, ArrayError> {
        Self::with_spacing(m_count, n_count, 0.5, 0.5)
    }

    pub fn with_spacing(
        m_count: usize,
        n_count: usize,
        dx_wavelengths: f64,
        dy_wavelengths: f64,
    ) -> Result<Self, ArrayError> {
        if m_count == 0 || n_count == 0 {
            return Err(ArrayError::InvalidGeometry("element counts must be at least 1"));
        }
        if !(dx_wavelengths.is_finite() && dx_wavelengths > 0.0)
            || !(dy_wavelengths.is_finite() && dy_wavelengths > 0.0)
        {
            return Err(ArrayError::InvalidGeometry("element spacing must be positive and finite"));
        }
        Ok(Self {
            m_count,
            n_count,
            dx_wavelengths,
            dy_wavelengths,
        })
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn n_count(&self) -> usize {
        self.n_count
    }

    pub fn dx_wavelengths(&self) -> f64 {
        self.dx_wavelengths
    }

    pub fn dy_wavelengths(&self) -> f64 {
        self.dy_wavelengths
    }

    pub fn element_count(&self) -> usize {
        self.m_count * self.n_count
    }
}

/// Non-negative amplitude weights on an `M x N` grid, stored row-major
/// (row index along x, column index along y). Phases are zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExcitationMatrix {
    m_count: usize,
    n_count: usize,
    amplitudes: Vec<f64>,
}

impl ExcitationMatrix {
    pub fn new(m_count: usize, n_count: usize, amplitudes: Vec<f64>) -> Result<Self, ArrayError> {
        if m_count == 0 || n_count == 0 {
            return Err(ArrayError::InvalidExcitation("grid must be at least 1x1"));
        }
        if amplitudes.len() != m_count * n_count {
            return Err(ArrayError::InvalidExcitation("amplitude count does not match grid size"));
        }
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(ArrayError::InvalidExcitation("amplitudes must be finite and non-negative"));
        }
        Ok(Self {
            m_count,
            n_count,
            amplitudes,
        })
    }

    pub fn uniform(m_count: usize, n_count: usize, amplitude: f64) -> Result<Self, ArrayError> {
        Self::new(m_count, n_count, alloc::vec![amplitude; m_count * n_count])
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ArrayError> {
        let m_count = rows.len();
        let n_count = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_count) {
            return Err(ArrayError::InvalidExcitation("rows have unequal lengths"));
        }
        Self::new(m_count, n_count, rows.concat())
    }

    /// Separable excitation `a[m] * b[n]`.
    pub fn outer(along_x: &[f64], along_y: &[f64]) -> Result<Self, ArrayError> {
        let amplitudes = along_x
            .iter()
            .flat_map(|a| along_y.iter().map(move |b| a * b))
            .collect();
        Self::new(along_x.len(), along_y.len(), amplitudes)
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn n_count(&self) -> usize {
        self.n_count
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.amplitudes[m * self.n_count + n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.amplitudes.chunks_exact(self.n_count)
    }

    pub fn is_degenerate(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, ArrayError> {
        Self::new(
            self.m_count,
            self.n_count,
            self.amplitudes.iter().map(|a| a * factor).collect(),
        )
    }

    fn check_matches(&self, geometry: &ArrayGeometry) -> Result<(), ArrayError> {
        if self.m_count != geometry.m_count || self.n_count != geometry.n_count {
            return Err(ArrayError::DimensionMismatch {
                expected_m: geometry.m_count,
                expected_n: geometry.n_count,
                found_m: self.m_count,
                found_n: self.n_count,
            });
        }
        if self.is_degenerate() {
            return Err(ArrayError::DegenerateExcitation);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta_deg: f64,
    phi_deg: f64,
}

impl Direction {
    /// `theta_deg` must lie in `[0, 180]`; `phi_deg` is wrapped into `[0, 360)`.
    pub fn new(theta_deg: f64, phi_deg: f64) -> Result<Self, ArrayError> {
        if !theta_deg.is_finite() || !(0.0..=180.0).contains(&theta_deg) {
            return Err(ArrayError::InvalidDirection("theta must lie in [0, 180] degrees"));
        }
        if !phi_deg.is_finite() {
            return Err(ArrayError::InvalidDirection("phi must be finite"));
        }
        Ok(Self {
            theta_deg,
            phi_deg: normalize_phi(phi_deg),
        })
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }
}

fn normalize_phi(phi_deg: f64) -> f64 {
    let wrapped = libm::fmod(phi_deg, 360.0);
    let wrapped = if wrapped < 0.0 { wrapped + 360.0 } else { wrapped };
    // -1e-20 + 360 rounds to 360
    if wrapped >= 360.0 {
        0.0
    } else {
        wrapped
    }
}

/// `(cos phi, sin phi)`, exact on the principal axes so axis cuts stay separable.
fn phi_cos_sin(phi_deg: f64) -> (f64, f64) {
    let phi = normalize_phi(phi_deg);
    if phi == 0.0 {
        (1.0, 0.0)
    } else if phi == 90.0 {
        (0.0, 1.0)
    } else if phi == 180.0 {
        (-1.0, 0.0)
    } else if phi == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = phi.to_radians();
        (libm::cos(rad), libm::sin(rad))
    }
}

/// Complex array factor in one direction, phase-referenced to the first element.
pub fn evaluate_array_factor(
    geometry: &ArrayGeometry,
    excitation: &ExcitationMatrix,
    direction: Direction,
    convention: AngleConvention,
) -> Result<Complex64, ArrayError> {
    excitation.check_matches(geometry)?;
    let projection = convention.projection(direction.theta_deg);
    let (cos_phi, sin_phi) = phi_cos_sin(direction.phi_deg);
    let kx_dx = 2.0 * PI * projection * cos_phi * geometry.dx_wavelengths;
    let ky_dy = 2.0 * PI * projection * sin_phi * geometry.dy_wavelengths;

    let mut sum = Complex64::new(0.0, 0.0);
    for (m, row) in excitation.rows().enumerate() {
        for (n, &amplitude) in row.iter().enumerate() {
            let phase = m as f64 * kx_dx + n as f64 * ky_dy;
            sum += Complex64::new(amplitude * libm::cos(phase), amplitude * libm::sin(phase));
        }
    }
    Ok(sum)
}

/// Uniformly spaced polar-angle grid, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaGrid {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub points: usize,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            start_deg: 0.0,
            stop_deg: 180.0,
            points: 1801,
        }
    }
}

impl ThetaGrid {
    pub fn new(start_deg: f64, stop_deg: f64, points: usize) -> Result<Self, ArrayError> {
        let grid = Self {
            start_deg,
            stop_deg,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        if self.points < 3 {
            return Err(ArrayError::InvalidGrid("at least 3 samples are required"));
        }
        if !(self.start_deg.is_finite() && self.stop_deg.is_finite())
            || self.start_deg < 0.0
            || self.stop_deg > 180.0
            || self.start_deg >= self.stop_deg
        {
            return Err(ArrayError::InvalidGrid("range must satisfy 0 <= start < stop <= 180"));
        }
        Ok(())
    }

    /// Samples in increasing order, ending exactly at `stop_deg`.
    ///
    /// When the range is centered on 90 degrees the lower half is built as
    /// `180 - upper`, so mirrored samples are exact mirrors.
    pub fn samples(&self) -> Vec<f64> {
        let last = self.points - 1;
        let step = (self.stop_deg - self.start_deg) / last as f64;
        let linear = |i: usize| {
            if i == last {
                self.stop_deg
            } else {
                self.start_deg + i as f64 * step
            }
        };
        if self.start_deg + self.stop_deg != 180.0 {
            return (0..self.points).map(linear).collect();
        }
        (0..self.points)
            .map(|i| {
                let mirror = last - i;
                match i.cmp(&mirror) {
                    core::cmp::Ordering::Less => 180.0 - linear(mirror),
                    core::cmp::Ordering::Equal => 90.0,
                    core::cmp::Ordering::Greater => linear(i),
                }
            })
            .collect()
    }
}

fn validate_theta_samples(theta_deg: &[f64]) -> Result<(), ArrayError> {
    if theta_deg.len() < 3 {
        return Err(ArrayError::InvalidGrid("at least 3 samples are required"));
    }
    if theta_deg.iter().any(|t| !t.is_finite() || !(0.0..=180.0).contains(t)) {
        return Err(ArrayError::InvalidGrid("samples must lie in [0, 180] degrees"));
    }
    if theta_deg.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ArrayError::InvalidGrid("samples must be strictly increasing"));
    }
    Ok(())
}

/// One azimuthal slice of the normalized pattern.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PatternCut {
    phi_deg: f64,
    theta_deg: Vec<f64>,
    magnitude_db: Vec<f64>,
}

impl PatternCut {
    /// Wraps already normalized samples. The grid must be valid and the
    /// samples must peak at 0 dB.
    pub fn from_parts(
        phi_deg: f64,
        theta_deg: Vec<f64>,
        magnitude_db: Vec<f64>,
    ) -> Result<Self, ArrayError> {
        validate_theta_samples(&theta_deg)?;
        if magnitude_db.len() != theta_deg.len() {
            return Err(ArrayError::InvalidCut("sample count does not match grid"));
        }
        if magnitude_db.iter().any(|v| v.is_nan()) {
            return Err(ArrayError::InvalidCut("samples must not be NaN"));
        }
        let peak = magnitude_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if libm::fabs(peak) > NORMALIZATION_TOLERANCE_DB {
            return Err(ArrayError::InvalidCut("samples must peak at 0 dB"));
        }
        Ok(Self {
            phi_deg,
            theta_deg,
            magnitude_db,
        })
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }

    pub fn theta_deg(&self) -> &[f64] {
        &self.theta_deg
    }

    pub fn magnitude_db(&self) -> &[f64] {
        &self.magnitude_db
    }

    pub fn len(&self) -> usize {
        self.theta_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_deg.is_empty()
    }
}

/// Angular span of the main lobe, bracketed by its adjacent nulls.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LobeInterval {
    pub theta_low_deg: f64,
    pub theta_high_deg: f64,
}

impl LobeInterval {
    pub fn contains(&self, theta_deg: f64) -> bool {
        (self.theta_low_deg..=self.theta_high_deg).contains(&theta_deg)
    }

    pub fn width_deg(&self) -> f64 {
        self.theta_high_deg - self.theta_low_deg
    }
}

#[derive(Debug, Clone, Copy)]
enum CutLayout {
    /// No phase progression along y: only row sums matter.
    AlongX,
    /// No phase progression along x: only column sums matter.
    AlongY,
    Full,
}

/// Precomputed steering phases for repeatedly evaluating one cut.
///
/// Phases are referenced to the array center, which leaves magnitudes
/// unchanged and keeps symmetric excitations numerically symmetric.
#[derive(Debug, Clone)]
pub struct CutEvaluator {
    geometry: ArrayGeometry,
    phi_deg: f64,
    theta_deg: Vec<f64>,
    layout: CutLayout,
    // theta-major, (cos, sin) per element index
    x_phases: Vec<(f64, f64)>,
    y_phases: Vec<(f64, f64)>,
}

impl CutEvaluator {
    pub fn new(
        geometry: &ArrayGeometry,
        phi_deg: f64,
        theta_deg: &[f64],
        convention: AngleConvention,
    ) -> Result<Self, ArrayError> {
        validate_theta_samples(theta_deg)?;
        if !phi_deg.is_finite() {
            return Err(ArrayError::InvalidDirection("phi must be finite"));
        }
        let (cos_phi, sin_phi) = phi_cos_sin(phi_deg);
        let layout = if sin_phi == 0.0 {
            CutLayout::AlongX
        } else if cos_phi == 0.0 {
            CutLayout::AlongY
        } else {
            CutLayout::Full
        };

        let m_center = (geometry.m_count as f64 - 1.0) / 2.0;
        let n_center = (geometry.n_count as f64 - 1.0) / 2.0;
        let mut x_phases = Vec::with_capacity(theta_deg.len() * geometry.m_count);
        let mut y_phases = Vec::with_capacity(theta_deg.len() * geometry.n_count);
        for &theta in theta_deg {
            let projection = convention.projection(theta);
            let kx_dx = 2.0 * PI * projection * cos_phi * geometry.dx_wavelengths;
            let ky_dy = 2.0 * PI * projection * sin_phi * geometry.dy_wavelengths;
            x_phases.extend((0..geometry.m_count).map(|m| {
                let phase = (m as f64 - m_center) * kx_dx;
                (libm::cos(phase), libm::sin(phase))
            }));
            y_phases.extend((0..geometry.n_count).map(|n| {
                let phase = (n as f64 - n_center) * ky_dy;
                (libm::cos(phase), libm::sin(phase))
            }));
        }

        Ok(Self {
            geometry: *geometry,
            phi_deg: normalize_phi(phi_deg),
            theta_deg: theta_deg.to_vec(),
            layout,
            x_phases,
            y_phases,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn theta_deg(&self) -> &[f64] {
        &self.theta_deg
    }

    /// `|AF|` at every grid sample (unnormalized).
    pub fn magnitudes(&self, excitation: &ExcitationMatrix) -> Result<Vec<f64>, ArrayError> {
        excitation.check_matches(&self.geometry)?;
        let m_count = self.geometry.m_count;
        let n_count = self.geometry.n_count;

        let magnitudes = match self.layout {
            CutLayout::AlongX => {
                let sums: Vec<f64> = excitation.rows().map(|r| r.iter().sum()).collect();
                self.x_phases
                    .chunks_exact(m_count)
                    .map(|phases| weighted_phase_sum(&sums, phases))
                    .collect()
            }
            CutLayout::AlongY => {
                let sums: Vec<f64> = (0..n_count)
                    .map(|n| (0..m_count).map(|m| excitation.get(m, n)).sum())
                    .collect();
                self.y_phases
                    .chunks_exact(n_count)
                    .map(|phases| weighted_phase_sum(&sums, phases))
                    .collect()
            }
            CutLayout::Full => self
                .x_phases
                .chunks_exact(m_count)
                .zip(self.y_phases.chunks_exact(n_count))
                .map(|(xp, yp)| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (row, &(xc, xs)) in excitation.rows().zip(xp) {
                        let (mut row_re, mut row_im) = (0.0, 0.0);
                        for (&a, &(yc, ys)) in row.iter().zip(yp) {
                            row_re += a * yc;
                            row_im += a * ys;
                        }
                        re += row_re * xc - row_im * xs;
                        im += row_re * xs + row_im * xc;
                    }
                    libm::hypot(re, im)
                })
                .collect(),
        };
        Ok(magnitudes)
    }

    pub fn cut(&self, excitation: &ExcitationMatrix) -> Result<PatternCut, ArrayError> {
        let magnitudes = self.magnitudes(excitation)?;
        let peak = magnitudes.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 || !peak.is_finite() {
            return Err(ArrayError::DegenerateExcitation);
        }
        let magnitude_db = magnitudes
            .iter()
            .map(|&v| {
                let ratio = v / peak;
                if ratio > 0.0 {
                    (20.0 * libm::log10(ratio)).max(DB_FLOOR)
                } else {
                    DB_FLOOR
                }
            })
            .collect();
        Ok(PatternCut {
            phi_deg: self.phi_deg,
            theta_deg: self.theta_deg.clone(),
            magnitude_db,
        })
    }
}

fn weighted_phase_sum(weights: &[f64], phases: &[(f64, f64)]) -> f64 {
    let (re, im) = weights
        .iter()
        .zip(phases)
        .fold((0.0, 0.0), |(re, im), (&w, &(c, s))| (re + w * c, im + w * s));
    libm::hypot(re, im)
}

/// Samples the normalized pattern along the `phi_deg` plane.
pub fn evaluate_cut(
    geometry: &ArrayGeometry,
    excitation: &ExcitationMatrix,
    phi_deg: f64,
    theta_deg: &[f64],
    convention: AngleConvention,
) -> Result<PatternCut, ArrayError> {
    CutEvaluator::new(geometry, phi_deg, theta_deg, convention)?.cut(excitation)
}

/// Brackets the lobe around the global maximum by the first local minimum on
/// each side. A side with no interior minimum runs to the grid boundary.
pub fn locate_main_lobe(cut: &PatternCut) -> Result<LobeInterval, ArrayError> {
    let db = &cut.magnitude_db;
    if db.len() < 3 {
        return Err(ArrayError::InvalidCut("at least 3 samples are required"));
    }
    let peak = peak_index(db);

    let mut low = peak;
    while low > 0 && db[low - 1] <= db[low] {
        low -= 1;
    }
    let mut high = peak;
    while high + 1 < db.len() && db[high + 1] <= db[high] {
        high += 1;
    }
    Ok(LobeInterval {
        theta_low_deg: cut.theta_deg[low],
        theta_high_deg: cut.theta_deg[high],
    })
}

/// Global maximum; ties go to the sample nearest the middle of the grid.
fn peak_index(db: &[f64]) -> usize {
    let center = (db.len() - 1) as f64 / 2.0;
    let distance = |i: usize| libm::fabs(i as f64 - center);
    let mut best = 0;
    for i in 1..db.len() {
        if db[i] > db[best] || (db[i] == db[best] && distance(i) < distance(best)) {
            best = i;
        }
    }
    best
}

/// Highest sample strictly outside the main lobe, in dB relative to the peak.
pub fn compute_sll(cut: &PatternCut, lobe: &LobeInterval) -> Result<f64, ArrayError> {
    let first = cut.theta_deg[0];
    let last = cut.theta_deg[cut.len() - 1];
    if !(lobe.theta_low_deg >= first
        && lobe.theta_high_deg <= last
        && lobe.theta_low_deg < lobe.theta_high_deg)
    {
        return Err(ArrayError::LobeOutsideGrid {
            low_deg: lobe.theta_low_deg,
            high_deg: lobe.theta_high_deg,
        });
    }
    cut.theta_deg
        .iter()
        .zip(&cut.magnitude_db)
        .filter(|(t, _)| **t < lobe.theta_low_deg || **t > lobe.theta_high_deg)
        .map(|(_, v)| *v)
        .reduce(f64::max)
        .ok_or(ArrayError::NoSidelobeRegion)
}
