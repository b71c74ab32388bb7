//! Receive geometry, channel synthesis and the correlated noise model.
//!
//! Each LNB sees the satellites through the far-field power pattern of a
//! uniformly illuminated circular aperture, `g(θ) = [2·J₁(u)/u]²` with
//! `u = (πD/λ)·sin θ`, steered to the LNB boresight. Lateral feed offsets add
//! a geometric phase `2π·d·sin θ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{chol, CMatrix};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ku-band carrier used when none is given.
pub const DEFAULT_CARRIER_HZ: f64 = 11.7e9;

pub const DEFAULT_SATELLITE_ANGLES_DEG: [f64; 5] = [0.0, -5.9, -2.8, 3.0, 5.7];
pub const DEFAULT_LNB_BORESIGHTS_DEG: [f64; 3] = [-3.0, 0.0, 3.0];
pub const DEFAULT_LNB_OFFSETS_WAVELENGTHS: [f64; 3] = [-1.5, 0.0, 1.5];
pub const DEFAULT_DISH_DIAMETER_M: f64 = 0.35;

/// Spatial noise correlation between three neighbouring LNBs.
pub const DEFAULT_NOISE_CORRELATION: [f64; 9] = [1.0, 0.1, 0.05, 0.1, 1.0, 0.1, 0.05, 0.1, 1.0];

/// Dish, feeds and satellites of one receive site.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    satellite_angles_deg: Vec<f64>,
    lnb_boresights_deg: Vec<f64>,
    lnb_offsets_wavelengths: Vec<f64>,
    dish_diameter_m: f64,
    wavelength_m: f64,
    noise_correlation: CMatrix,
}

impl Scenario {
    /// Validates and builds a scenario. The receiver must be overloaded
    /// (more satellites than LNBs) and the noise correlation must be a
    /// Hermitian positive definite matrix with unit diagonal.
    pub fn new(
        satellite_angles_deg: Vec<f64>,
        lnb_boresights_deg: Vec<f64>,
        lnb_offsets_wavelengths: Vec<f64>,
        dish_diameter_m: f64,
        wavelength_m: f64,
        noise_correlation: CMatrix,
    ) -> Result<Self> {
        let m = lnb_boresights_deg.len();
        let n = satellite_angles_deg.len();
        if m == 0 {
            return Err(Error::Scenario("at least one LNB is required"));
        }
        if n <= m {
            return Err(Error::Scenario(
                "receiver must be overloaded (more satellites than LNBs)",
            ));
        }
        if lnb_offsets_wavelengths.len() != m {
            return Err(Error::Scenario("one lateral offset per LNB is required"));
        }
        if satellite_angles_deg
            .iter()
            .chain(&lnb_boresights_deg)
            .chain(&lnb_offsets_wavelengths)
            .any(|x| !x.is_finite())
        {
            return Err(Error::Scenario("angles and offsets must be finite"));
        }
        if !(dish_diameter_m > 0.0 && dish_diameter_m.is_finite()) {
            return Err(Error::Scenario("dish diameter must be positive"));
        }
        if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
            return Err(Error::Scenario("wavelength must be positive"));
        }
        validate_correlation(&noise_correlation, m)?;
        Ok(Self {
            satellite_angles_deg,
            lnb_boresights_deg,
            lnb_offsets_wavelengths,
            dish_diameter_m,
            wavelength_m,
            noise_correlation,
        })
    }

    /// Five GEO satellites seen by a 35 cm dish with three LNBs at 11.7 GHz.
    pub fn default_geometry() -> Self {
        Self::new(
            DEFAULT_SATELLITE_ANGLES_DEG.to_vec(),
            DEFAULT_LNB_BORESIGHTS_DEG.to_vec(),
            DEFAULT_LNB_OFFSETS_WAVELENGTHS.to_vec(),
            DEFAULT_DISH_DIAMETER_M,
            wavelength_for(DEFAULT_CARRIER_HZ),
            default_noise_correlation(),
        )
        .expect("default geometry is valid")
    }

    pub fn num_satellites(&self) -> usize {
        self.satellite_angles_deg.len()
    }

    pub fn num_lnbs(&self) -> usize {
        self.lnb_boresights_deg.len()
    }

    pub fn satellite_angles_deg(&self) -> &[f64] {
        &self.satellite_angles_deg
    }

    pub fn lnb_boresights_deg(&self) -> &[f64] {
        &self.lnb_boresights_deg
    }

    pub fn lnb_offsets_wavelengths(&self) -> &[f64] {
        &self.lnb_offsets_wavelengths
    }

    pub fn dish_diameter_m(&self) -> f64 {
        self.dish_diameter_m
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    pub fn noise_correlation(&self) -> &CMatrix {
        &self.noise_correlation
    }

    /// Rule-of-thumb 3-dB beamwidth `70·λ/D`, in degrees.
    pub fn beamwidth_3db(&self) -> f64 {
        70.0 * self.wavelength_m / self.dish_diameter_m
    }

    /// Normalised power pattern at `theta_deg` off the beam axis.
    pub fn pattern_gain(&self, theta_deg: f64) -> f64 {
        aperture_amplitude(theta_deg, self.dish_diameter_m, self.wavelength_m).powi(2)
    }

    /// Array response `A` (LNBs by satellites).
    pub fn build_channel(&self) -> ChannelMatrix {
        let m = self.num_lnbs();
        let n = self.num_satellites();
        let a = CMatrix::from_fn(m, n, |i, j| {
            let theta = self.satellite_angles_deg[j];
            let amplitude = aperture_amplitude(
                theta - self.lnb_boresights_deg[i],
                self.dish_diameter_m,
                self.wavelength_m,
            );
            let phase = 2.0 * PI * self.lnb_offsets_wavelengths[i] * theta.to_radians().sin();
            Complex64::from_polar(amplitude, phase)
        });
        ChannelMatrix::new(a).expect("synthesised pattern has no all-zero column")
    }
}

pub fn default_noise_correlation() -> CMatrix {
    CMatrix::from_real(3, 3, &DEFAULT_NOISE_CORRELATION).expect("constant matrix")
}

pub fn wavelength_for(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

fn validate_correlation(k: &CMatrix, m: usize) -> Result<()> {
    if k.shape() != (m, m) {
        return Err(Error::Scenario("noise correlation must be M x M"));
    }
    if k.diagonal()
        .iter()
        .any(|d| (d.re - 1.0).abs() > 1e-12 || d.im.abs() > 1e-12)
    {
        return Err(Error::Scenario("noise correlation must have unit diagonal"));
    }
    if !k.is_hermitian(1e-12) {
        return Err(Error::Scenario("noise correlation must be Hermitian"));
    }
    chol(k).map_err(|_| Error::Scenario("noise correlation must be positive definite"))?;
    Ok(())
}

/// Field amplitude `|2·J₁(u)/u|` of a uniformly illuminated circular aperture.
pub fn aperture_amplitude(theta_deg: f64, diameter_m: f64, wavelength_m: f64) -> f64 {
    let u = PI * diameter_m / wavelength_m * theta_deg.to_radians().sin();
    if u.abs() < 1e-8 {
        return 1.0;
    }
    (2.0 * libm::j1(u) / u).abs()
}

/// Channel matrix with cached per-satellite received power.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    a: CMatrix,
    per_satellite_power: Vec<f64>,
}

impl ChannelMatrix {
    /// Wraps an externally supplied `M x N` response. Rejects all-zero columns.
    pub fn new(a: CMatrix) -> Result<Self> {
        let per_satellite_power: Vec<f64> = (0..a.cols()).map(|j| a.column_norm_sqr(j)).collect();
        if per_satellite_power.iter().any(|&p| p == 0.0) {
            return Err(Error::Scenario("channel has an all-zero column"));
        }
        Ok(Self { a, per_satellite_power })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn num_lnbs(&self) -> usize {
        self.a.rows()
    }

    pub fn num_satellites(&self) -> usize {
        self.a.cols()
    }

    /// `‖aⱼ‖²` for each satellite.
    pub fn per_satellite_power(&self) -> &[f64] {
        &self.per_satellite_power
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.a.column(j)
    }

    /// Noise power giving the requested SNR, with
    /// `SNR = ‖A‖²_F / (σ²·M·N)`.
    pub fn sigma2_for_snr(&self, snr_db: f64) -> f64 {
        sigma2_for_snr(
            self.a.frobenius_norm_sqr(),
            snr_db,
            self.num_lnbs(),
            self.num_satellites(),
        )
    }

    /// `A·s` for a vector of transmitted symbols.
    pub fn transmit(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        self.a.mul_vec(symbols)
    }
}

/// `σ² = ‖A‖²_F / (10^(snr_db/10) · M · N)`.
pub fn sigma2_for_snr(frobenius_sqr: f64, snr_db: f64, m: usize, n: usize) -> f64 {
    frobenius_sqr / (10f64.powf(snr_db / 10.0) * (m * n) as f64)
}

/// Spatially correlated circular Gaussian noise with covariance `σ²·K`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
    coloring: CMatrix,
}

impl NoiseModel {
    pub fn new(sigma2: f64, correlation: &CMatrix) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::Scenario("noise power must be positive"));
        }
        Ok(Self {
            sigma2,
            coloring: chol(correlation)?,
        })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Lower Cholesky factor of `K`.
    pub fn coloring(&self) -> &CMatrix {
        &self.coloring
    }

    pub fn dim(&self) -> usize {
        self.coloring.rows()
    }

    /// One draw `σ·C·v` with `v` i.i.d. unit-variance circular Gaussian.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let scale = (0.5 * self.sigma2).sqrt();
        let v: Vec<Complex64> = (0..self.dim())
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im) * scale
            })
            .collect();
        self.coloring.mul_vec(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn first_null_u() -> f64 {
        // Bisection on J1 over the bracket containing its first positive root.
        let (mut lo, mut hi) = (3.0_f64, 4.5_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if libm::j1(lo) * libm::j1(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn simple(angles: Vec<f64>, diameter: f64, wavelength: f64) -> Scenario {
        Scenario::new(angles, vec![0.0], vec![0.0], diameter, wavelength, CMatrix::identity(1)).unwrap()
    }

    #[test]
    fn beamwidth_rule() {
        let s = simple(vec![0.0, 3.0], 0.35, 0.025);
        assert!((s.beamwidth_3db() - 5.0).abs() < 1e-12);
        let s = simple(vec![0.0, 3.0], 1.0, 1.0);
        assert!((s.beamwidth_3db() - 70.0).abs() < 1e-12);
        let s2 = simple(vec![0.0, 3.0], 2.0, 1.0);
        assert!((s2.beamwidth_3db() - 35.0).abs() < 1e-12);
    }

    #[test]
    fn boresight_peak_and_first_null() {
        let (d, lambda) = (0.35, 0.025);
        let null_deg = (first_null_u() * lambda / (PI * d)).asin().to_degrees();
        let s = simple(vec![0.0, null_deg], d, lambda);
        let ch = s.build_channel();
        assert_eq!(ch.matrix()[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(ch.matrix()[(0, 1)].norm() <= 1e-6);
    }

    #[test]
    fn default_geometry_power_ranking() {
        let ch = Scenario::default_geometry().build_channel();
        let p = ch.per_satellite_power();
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[j].total_cmp(&p[i]));
        assert_eq!(order[0], 0, "central satellite is strongest: {p:?}");
        let mut top3 = order[..3].to_vec();
        top3.sort_unstable();
        assert_eq!(top3, vec![0, 2, 3]);
        for (j, &pj) in p.iter().enumerate() {
            assert!((pj - ch.matrix().column_norm_sqr(j)).abs() <= 1e-12 * pj);
        }
    }

    #[test]
    fn channel_is_deterministic() {
        let s = Scenario::default_geometry();
        assert_eq!(s.build_channel(), s.build_channel());
    }

    #[test]
    fn rejects_invalid_scenarios() {
        let k = default_noise_correlation();
        assert!(Scenario::new(
            vec![0.0, 1.0, 2.0],
            vec![-3.0, 0.0, 3.0],
            vec![0.0; 3],
            0.35,
            0.025,
            k.clone()
        )
        .is_err());
        assert!(Scenario::new(vec![0.0; 4], vec![-3.0, 0.0, 3.0], vec![0.0; 3], -1.0, 0.025, k.clone()).is_err());
        let bad_k = CMatrix::from_real(3, 3, &[1.0, 0.9, 0.9, 0.9, 1.0, -0.9, 0.9, -0.9, 1.0]).unwrap();
        assert!(Scenario::new(vec![0.0; 4], vec![-3.0, 0.0, 3.0], vec![0.0; 3], 0.35, 0.025, bad_k).is_err());
        let scaled = k.scale(2.0);
        assert!(Scenario::new(vec![0.0; 4], vec![-3.0, 0.0, 3.0], vec![0.0; 3], 0.35, 0.025, scaled).is_err());
    }

    #[test]
    fn snr_calibration() {
        assert!((sigma2_for_snr(6.0, 0.0, 2, 3) - 1.0).abs() < 1e-15);
        let ch = Scenario::default_geometry().build_channel();
        let s0 = ch.sigma2_for_snr(0.0);
        let s10 = ch.sigma2_for_snr(10.0);
        assert!((s0 / s10 - 10.0).abs() < 1e-12);
        for snr in [-3.0, 0.0, 7.5, 20.0] {
            let sigma2 = ch.sigma2_for_snr(snr);
            let back = 10.0 * (ch.matrix().frobenius_norm_sqr() / (sigma2 * 15.0)).log10();
            assert!((back - snr).abs() <= 1e-12 * snr.abs().max(1.0));
        }
    }

    fn sample_covariance(model: &NoiseModel, draws: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model.dim();
        let mut acc = CMatrix::zeros(m, m);
        for _ in 0..draws {
            let n = model.draw(&mut rng);
            for r in 0..m {
                for c in 0..m {
                    acc[(r, c)] += n[r] * n[c].conj();
                }
            }
        }
        acc.scale(1.0 / draws as f64)
    }

    #[test]
    fn white_noise_covariance() {
        let model = NoiseModel::new(0.7, &CMatrix::identity(3)).unwrap();
        let cov = sample_covariance(&model, 1_000_000, 1);
        let target = CMatrix::identity(3).scale(0.7);
        assert!((&cov - &target).frobenius_norm() / target.frobenius_norm() < 0.02);
    }

    #[test]
    fn correlated_noise_covariance() {
        let k = default_noise_correlation();
        let model = NoiseModel::new(2.0, &k).unwrap();
        let cov = sample_covariance(&model, 1_000_000, 2);
        let target = k.scale(2.0);
        assert!((&cov - &target).frobenius_norm() / target.frobenius_norm() < 0.02);
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let model = NoiseModel::new(1.0, &default_noise_correlation()).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(77);
        let mut b = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            assert_eq!(model.draw(&mut a), model.draw(&mut b));
        }
    }
}
