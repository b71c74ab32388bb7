//! Linear preprocessing: beamformer `W` followed by a whitening filter `F`,
//! giving `y = Fᴴ·Wᴴ·r = H·s + z` with `H = Fᴴ·Wᴴ·A`.
//!
//! Two variants are provided. [`PreprocessorKind::Mrc`] combines with the
//! channel itself and whitens as if the noise were white. The Wiener-Hopf
//! variant combines with `R⁻¹·A`, the per-stream SINR maximiser, and whitens
//! the actual post-beamformer noise `σ²·Wᴴ·K·W`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{self, dot_conj, herm_eig, CMatrix, HermEig, RANK_TOLERANCE};
use crate::scenario::ChannelMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreprocessorKind {
    Mrc,
    WienerHopf,
}

impl fmt::Display for PreprocessorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreprocessorKind::Mrc => "mrc",
            PreprocessorKind::WienerHopf => "wiener-hopf",
        })
    }
}

/// Second-order statistics of the received vector for unit-power,
/// uncorrelated symbols: `R = Σ aₘ·aₘᴴ + σ²·K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSet {
    pub r: CMatrix,
    pub r_m: Vec<CMatrix>,
    pub r_nn: CMatrix,
}

impl CovarianceSet {
    pub fn build(channel: &ChannelMatrix, sigma2: f64, k: &CMatrix) -> Result<Self> {
        let m = channel.num_lnbs();
        if k.shape() != (m, m) {
            return Err(Error::Dimension {
                expected: "M x M noise correlation",
                got: k.shape(),
            });
        }
        let r_m: Vec<CMatrix> = (0..channel.num_satellites())
            .map(|j| {
                let a = channel.column(j);
                CMatrix::outer(&a, &a)
            })
            .collect();
        let r_nn = k.scale(sigma2);
        let r = r_m.iter().fold(r_nn.clone(), |acc, rm| &acc + rm);
        Ok(Self { r, r_m, r_nn })
    }

    pub fn num_streams(&self) -> usize {
        self.r_m.len()
    }

    /// `R − Rₘ`: everything stream `m` sees as interference or noise.
    pub fn interference_plus_noise(&self, m: usize) -> CMatrix {
        &self.r - &self.r_m[m]
    }

    /// Output SINR of beamformer `w` for stream `m`,
    /// `wᴴ·Rₘ·w / wᴴ·(R − Rₘ)·w`.
    pub fn sinr(&self, w: &[Complex64], m: usize) -> Result<f64> {
        if w.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroVector);
        }
        let quad = |mat: &CMatrix| dot_conj(w, &mat.mul_vec(w)).re;
        let signal = quad(&self.r_m[m]);
        let rest = quad(&self.r) - signal;
        Ok(signal / rest)
    }
}

/// Beamformer plus whitening filter, with the resulting equivalent channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessor {
    kind: PreprocessorKind,
    w: CMatrix,
    f: CMatrix,
    h: CMatrix,
    g: CMatrix,
    g_eig: HermEig,
    rank_g: usize,
    // Fᴴ·Wᴴ, applied to every received vector.
    combined: CMatrix,
}

impl Preprocessor {
    /// `W = A`, `F = ((AᴴA)†)^(1/2)`.
    pub fn build_mrc(channel: &ChannelMatrix) -> Result<Self> {
        let a = channel.matrix();
        let g = &a.adjoint() * a;
        let g_eig = herm_eig(&g)?;
        let f = numerics::pinv_sqrt_from_eig(&g_eig)?;
        Ok(Self::assemble(PreprocessorKind::Mrc, a.clone(), f, g, g_eig, a))
    }

    /// `W = R⁻¹·A`, `G = Wᴴ·K·W = U·L·Uᴴ`, `F = U·(L†)^(1/2)` with the
    /// eigenpairs in descending order, so null modes land in the trailing
    /// coordinates of `y`.
    pub fn build_wiener_hopf(cov: &CovarianceSet, channel: &ChannelMatrix, k: &CMatrix) -> Result<Self> {
        let a = channel.matrix();
        let w = numerics::solve(&cov.r, a)?;
        let g_raw = &(&w.adjoint() * k) * &w;
        let n = g_raw.rows();
        let g = CMatrix::from_fn(n, n, |r, c| (g_raw[(r, c)] + g_raw[(c, r)].conj()) * 0.5);
        let g_eig = herm_eig(&g)?;
        numerics::check_psd(&g_eig)?;
        let cutoff = RANK_TOLERANCE * g_eig.values[0].max(0.0);
        let mut f = g_eig.vectors.clone();
        for (col, &l) in g_eig.values.iter().enumerate() {
            let s = if l > cutoff { 1.0 / l.sqrt() } else { 0.0 };
            for row in 0..n {
                f[(row, col)] *= s;
            }
        }
        Ok(Self::assemble(PreprocessorKind::WienerHopf, w, f, g, g_eig, a))
    }

    /// Builds the preprocessor of the requested kind from scratch.
    pub fn build(kind: PreprocessorKind, channel: &ChannelMatrix, sigma2: f64, k: &CMatrix) -> Result<Self> {
        match kind {
            PreprocessorKind::Mrc => Self::build_mrc(channel),
            PreprocessorKind::WienerHopf => {
                let cov = CovarianceSet::build(channel, sigma2, k)?;
                Self::build_wiener_hopf(&cov, channel, k)
            }
        }
    }

    fn assemble(kind: PreprocessorKind, w: CMatrix, f: CMatrix, g: CMatrix, g_eig: HermEig, a: &CMatrix) -> Self {
        let combined = &f.adjoint() * &w.adjoint();
        let h = &combined * a;
        let rank_g = g_eig.rank();
        Self {
            kind,
            w,
            f,
            h,
            g,
            g_eig,
            rank_g,
            combined,
        }
    }

    pub fn kind(&self) -> PreprocessorKind {
        self.kind
    }

    /// Beamformer `W` (M x N).
    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    /// Whitening filter `F` (N x N).
    pub fn f(&self) -> &CMatrix {
        &self.f
    }

    /// Equivalent channel `H = Fᴴ·Wᴴ·A` (N x N).
    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    /// Gram matrix the whitener was designed for: `AᴴA` for MRC (white
    /// noise assumption), `Wᴴ·K·W` for Wiener-Hopf.
    pub fn g(&self) -> &CMatrix {
        &self.g
    }

    pub fn rank_g(&self) -> usize {
        self.rank_g
    }

    /// `y = Fᴴ·Wᴴ·r`.
    pub fn apply(&self, r: &[Complex64]) -> Vec<Complex64> {
        self.combined.mul_vec(r)
    }

    /// `Fᴴ·G·F`.
    pub fn whitened_gram(&self) -> CMatrix {
        &(&self.f.adjoint() * &self.g) * &self.f
    }

    /// Distance of `Fᴴ·G·F` from the rank-`rank_g` 0/1 diagonal, measured in
    /// the eigenbasis of `G`. For Wiener-Hopf that basis is the coordinate
    /// basis of `y`; the symmetric MRC root yields the same projector
    /// expressed in the original coordinates.
    pub fn whitening_defect(&self) -> f64 {
        let x = self.whitened_gram();
        let x = match self.kind {
            PreprocessorKind::WienerHopf => x,
            PreprocessorKind::Mrc => {
                let u = &self.g_eig.vectors;
                &(&u.adjoint() * &x) * u
            }
        };
        let n = x.rows();
        let target = CMatrix::from_fn(n, n, |r, c| {
            Complex64::new(if r == c && r < self.rank_g { 1.0 } else { 0.0 }, 0.0)
        });
        (&x - &target).frobenius_norm()
    }

    /// `Fᴴ·Wᴴ·K·W·F`, the covariance of `z` per unit noise power.
    pub fn noise_gram(&self, k: &CMatrix) -> CMatrix {
        &(&self.combined * k) * &self.combined.adjoint()
    }
}
