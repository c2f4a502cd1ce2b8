//! Deterministic generators for the GP and index-2 test families, Jordan
//! blocks, and consistent/inconsistent right-hand sides.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::densela::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Spectral decay parameters of the generated families: the last Jordan
/// eigenvalue is `α₁₆ = 10^{−ρ}` and the last diagonal entry `β₃₂ = 10^{−γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpParams {
    pub rho: f64,
    pub gamma: f64,
}

impl GpParams {
    pub fn new(rho: f64, gamma: f64) -> Result<Self> {
        if !(rho > 0.0 && gamma > 0.0) {
            return Err(Error::InvalidParameter("rho and gamma must be > 0"));
        }
        Ok(Self { rho, gamma })
    }

    /// Default for the GP suite: ρ = γ = 12.
    pub fn gp_default() -> Self {
        Self {
            rho: 12.0,
            gamma: 12.0,
        }
    }

    /// Default for the index-2 suite: ρ = 12, γ = 15.
    pub fn index2_default() -> Self {
        Self {
            rho: 12.0,
            gamma: 15.0,
        }
    }

    /// `α_j = α₁₆ + (16−j)/15 · (α₁ − α₁₆) · 0.7^{j−1}` for j = 1…16,
    /// with `α₁ = 1`, `α₁₆ = 10^{−ρ}`.
    pub fn alphas(&self) -> [f64; 16] {
        let a16 = libm::pow(10.0, -self.rho);
        let mut a = [0.0; 16];
        for (idx, aj) in a.iter_mut().enumerate() {
            let j = (idx + 1) as f64;
            *aj = a16 + (16.0 - j) / 15.0 * (1.0 - a16) * libm::pow(0.7, j - 1.0);
        }
        a
    }

    /// `β_i = β₃₂ + (32−i)/31 · (β₁ − β₃₂) · 0.2^{i−1}` for i = 1…32,
    /// with `β₁ = 1`, `β₃₂ = 10^{−γ}`.
    pub fn betas(&self) -> [f64; 32] {
        let b32 = libm::pow(10.0, -self.gamma);
        let mut b = [0.0; 32];
        for (idx, bi) in b.iter_mut().enumerate() {
            let i = (idx + 1) as f64;
            *bi = b32 + (32.0 - i) / 31.0 * (1.0 - b32) * libm::pow(0.2, i - 1.0);
        }
        b
    }
}

/// Right-hand-side recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsMode {
    /// `b = Ae/‖Ae‖₂` — lies in the range of `A`.
    Consistent,
    /// Consistent vector plus `noise_scale · u/‖u‖₂` with `u` uniform in
    /// (0,1) from the given seed.
    Inconsistent { noise_scale: f64, seed: u64 },
}

/// Generated family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gp,
    Index2,
    Custom,
}

/// A generated matrix/right-hand-side pair with its provenance.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: DenseVector,
    pub family: Family,
    pub params: GpParams,
    pub rhs_mode: RhsMode,
}

impl ProblemInstance {
    /// Generates a full problem from family, parameters, and RHS mode.
    pub fn generate(family: Family, params: GpParams, rhs_mode: RhsMode) -> Result<Self> {
        let a = match family {
            Family::Gp => gen_gp_matrix(&params)?,
            Family::Index2 => gen_index2_matrix(&params)?,
            Family::Custom => {
                return Err(Error::InvalidParameter("cannot generate a custom family"))
            }
        };
        let b = gen_rhs(&a, rhs_mode)?;
        Ok(Self {
            a,
            b,
            family,
            params,
            rhs_mode,
        })
    }
}

/// `k×k` Jordan block: `λ` on the diagonal, 1 on the superdiagonal.
pub fn jordan_block(k: usize, lambda: f64) -> DenseMatrix {
    let mut j = DenseMatrix::zeros(k, k);
    for i in 0..k {
        j[(i, i)] = lambda;
        if i + 1 < k {
            j[(i, i + 1)] = 1.0;
        }
    }
    j
}

/// Writes `src` into `dst` with its top-left corner at `(r0, c0)`.
fn embed(dst: &mut DenseMatrix, src: &DenseMatrix, r0: usize, c0: usize) {
    for j in 0..src.cols() {
        for i in 0..src.rows() {
            dst[(r0 + i, c0 + j)] = src[(i, j)];
        }
    }
}

/// Builds the shared blocks `A₁₁` (64×64) and `A₁₂` (64×64) into a 128×128
/// zero matrix.
fn gen_upper_blocks(params: &GpParams) -> DenseMatrix {
    let alphas = params.alphas();
    let betas = params.betas();
    let mut a = DenseMatrix::zeros(128, 128);

    // A₁₁ = blkdiag(W, D): W = blkdiag(J₂(α₁)…J₂(α₁₆)), D = diag(β₁…β₃₂).
    for (j, &alpha) in alphas.iter().enumerate() {
        embed(&mut a, &jordan_block(2, alpha), 2 * j, 2 * j);
    }
    for (i, &beta) in betas.iter().enumerate() {
        a[(32 + i, 32 + i)] = beta;
    }
    // A₁₂ = blkdiag(J₂(β₁)…J₂(β₁₆)) in the top-left of the 64×64 block.
    for (j, &beta) in betas[..16].iter().enumerate() {
        embed(&mut a, &jordan_block(2, beta), 2 * j, 64 + 2 * j);
    }
    a
}

/// 128×128 GP (index-1) test matrix `[[A₁₁, A₁₂], [0, 0]]`.
pub fn gen_gp_matrix(params: &GpParams) -> Result<DenseMatrix> {
    GpParams::new(params.rho, params.gamma)?;
    Ok(gen_upper_blocks(params))
}

/// 128×128 index-2 test matrix `[[A₁₁, A₁₂], [0, A₂₂]]` where `A₂₂` has
/// ones at 1-based positions `(2i+63, 2i+64)` for i = 1…16 (a nilpotent
/// pattern: `A₂₂² = 0`).
pub fn gen_index2_matrix(params: &GpParams) -> Result<DenseMatrix> {
    GpParams::new(params.rho, params.gamma)?;
    let mut a = gen_upper_blocks(params);
    for i in 1..=16usize {
        a[(2 * i + 62, 2 * i + 63)] = 1.0;
    }
    Ok(a)
}

/// `n` pseudorandom values strictly inside (0,1), reproducible across
/// platforms.
///
/// Generator: ChaCha12 keyed via `seed_from_u64(seed)`; each draw maps the
/// top 53 bits of a `u64` to `[0,1)` as `(x >> 11) · 2⁻⁵³` and redraws the
/// (probability 2⁻⁵³) exact zero.
pub fn seeded_uniform(n: usize, seed: u64) -> DenseVector {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v = DenseVector::zeros(n);
    for i in 0..n {
        loop {
            let x = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
            if x > 0.0 {
                v[i] = x;
                break;
            }
        }
    }
    v
}

/// Right-hand side for a square matrix per the chosen recipe.
pub fn gen_rhs(a: &DenseMatrix, mode: RhsMode) -> Result<DenseVector> {
    let n = a.rows();
    let ae = a.matvec(&DenseVector::ones(n))?;
    let norm = ae.norm2();
    if norm == 0.0 {
        return Err(Error::DegenerateRhs);
    }
    let mut b = ae;
    b.scale(1.0 / norm);
    if let RhsMode::Inconsistent { noise_scale, seed } = mode {
        if noise_scale <= 0.0 {
            return Err(Error::InvalidParameter("noise_scale must be > 0"));
        }
        let u = seeded_uniform(n, seed);
        let un = u.norm2();
        b.axpy(noise_scale / un, &u);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jordan_block_shapes() {
        let j1 = jordan_block(1, 5.0);
        assert_eq!(j1[(0, 0)], 5.0);
        let j2 = jordan_block(2, 0.0);
        assert_eq!(j2[(0, 0)], 0.0);
        assert_eq!(j2[(0, 1)], 1.0);
        assert_eq!(j2[(1, 0)], 0.0);
        assert_eq!(j2[(1, 1)], 0.0);
        let j3 = jordan_block(3, 2.0);
        for i in 0..3 {
            assert_eq!(j3[(i, i)], 2.0);
        }
        assert_eq!(j3[(0, 1)], 1.0);
        assert_eq!(j3[(1, 2)], 1.0);
        assert_eq!(j3[(2, 0)], 0.0);
    }

    #[test]
    fn alpha_sequence_endpoints_and_second_term() {
        let p = GpParams::gp_default();
        let a = p.alphas();
        assert_eq!(a[0], 1.0);
        assert_relative_eq!(a[15], 1e-12, max_relative = 1e-14);
        // α₂ = 10⁻¹² + (14/15)(1 − 10⁻¹²)·0.7
        assert_relative_eq!(a[1], 0.6533333333, max_relative = 1e-9);
        assert!(a.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn beta_sequence_endpoints() {
        let p = GpParams::index2_default();
        let b = p.betas();
        assert_eq!(b[0], 1.0);
        assert_relative_eq!(b[31], 1e-15, max_relative = 1e-14);
        assert!(b.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn params_reject_nonpositive_exponents() {
        assert!(GpParams::new(0.0, 12.0).is_err());
        assert!(GpParams::new(12.0, -1.0).is_err());
    }

    #[test]
    fn gp_matrix_named_entries() {
        let a = gen_gp_matrix(&GpParams::gp_default()).unwrap();
        assert_eq!((a.rows(), a.cols()), (128, 128));
        // First Jordan block J₂(α₁): diagonal 1 with superdiagonal 1.
        assert_eq!(a[(0, 0)], 1.0);
        assert_eq!(a[(0, 1)], 1.0);
        // Last Jordan block J₂(α₁₆) sits at rows/cols 31–32 (1-based).
        assert_eq!(a[(30, 30)], 1e-12);
        assert_eq!(a[(30, 31)], 1.0);
        // D starts at (33,33) 1-based with β₁ = 1.
        assert_eq!(a[(32, 32)], 1.0);
        // A₁₂'s first block J₂(β₁) at rows 1–2, cols 65–66 (1-based).
        assert_eq!(a[(0, 64)], 1.0);
        assert_eq!(a[(0, 65)], 1.0);
        assert_eq!(a[(1, 65)], 1.0);
        // Bottom half is entirely zero.
        for i in 64..128 {
            for j in 0..128 {
                assert_eq!(a[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn index2_matrix_pattern_and_nilpotency() {
        let a = gen_index2_matrix(&GpParams::index2_default()).unwrap();
        // 1-based (65,66) and (95,96).
        assert_eq!(a[(64, 65)], 1.0);
        assert_eq!(a[(94, 95)], 1.0);
        // Lower-right 64×64 block squared is zero.
        let mut a22 = DenseMatrix::zeros(64, 64);
        for i in 0..64 {
            for j in 0..64 {
                a22[(i, j)] = a[(64 + i, 64 + j)];
            }
        }
        let sq = a22.matmul(&a22).unwrap();
        assert!(sq.data().iter().all(|&x| x == 0.0));
        // Identical upper blocks to the GP construction.
        let gp = gen_gp_matrix(&GpParams::index2_default()).unwrap();
        for i in 0..64 {
            for j in 0..128 {
                assert_eq!(a[(i, j)], gp[(i, j)]);
            }
        }
    }

    #[test]
    fn seeded_uniform_is_deterministic_and_in_range() {
        let u1 = seeded_uniform(100, 42);
        let u2 = seeded_uniform(100, 42);
        assert_eq!(u1.as_slice(), u2.as_slice());
        assert!(u1.as_slice().iter().all(|&x| x > 0.0 && x < 1.0));
        let u3 = seeded_uniform(100, 43);
        assert_ne!(u1.as_slice(), u3.as_slice());
    }

    #[test]
    fn seeded_uniform_mean_near_half() {
        let u = seeded_uniform(10_000, 7);
        let mean: f64 = u.as_slice().iter().sum::<f64>() / 10_000.0;
        assert!(mean > 0.45 && mean < 0.55, "mean {mean}");
    }

    #[test]
    fn consistent_rhs_on_identity_is_normalized_ones() {
        let b = gen_rhs(&DenseMatrix::identity(4), RhsMode::Consistent).unwrap();
        for i in 0..4 {
            assert_relative_eq!(b[i], 0.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn inconsistent_rhs_noise_has_exact_scale() {
        let a = gen_gp_matrix(&GpParams::gp_default()).unwrap();
        let bc = gen_rhs(&a, RhsMode::Consistent).unwrap();
        let b = gen_rhs(
            &a,
            RhsMode::Inconsistent {
                noise_scale: 0.01,
                seed: 9,
            },
        )
        .unwrap();
        let diff = b.sub(&bc).norm2();
        assert_relative_eq!(diff, 0.01, max_relative = 1e-13);
    }

    #[test]
    fn degenerate_generator_input_is_rejected() {
        // Ae = 0 for this rank-1 matrix with balanced signs.
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!(matches!(
            gen_rhs(&a, RhsMode::Consistent),
            Err(Error::DegenerateRhs)
        ));
        assert!(gen_rhs(
            &a,
            RhsMode::Inconsistent {
                noise_scale: 0.0,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn generate_rejects_custom_family() {
        assert!(ProblemInstance::generate(
            Family::Custom,
            GpParams::gp_default(),
            RhsMode::Consistent
        )
        .is_err());
    }
}
