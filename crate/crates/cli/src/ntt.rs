//! Finite-field transform checks behind `ntt-check`, each against a
//! definitional oracle written out here.

use parseval_mpc::dft::{
    conjugate_transform, cyclic_convolve, dft_forward, dft_forward_naive, dft_inverse, dft_inverse_naive,
    orthogonality_holds, parseval_discrete, triple_product_sum, DftSequence,
};
use parseval_mpc::{FieldElement, PrimeField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct NttCheck {
    pub name: &'static str,
    pub description: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
}

/// `g(κ) = Σ f(n) ω^(-κn)` by the definition, with `ω^(-κ)` stepped per row.
pub fn forward_oracle(f: &[FieldElement], root: FieldElement) -> Vec<FieldElement> {
    let field = root.field();
    let w_inv = root.inv().expect("roots are units");
    let mut row = field.one();
    (0..f.len())
        .map(|_| {
            let mut acc = field.zero();
            let mut w = field.one();
            for x in f {
                acc = acc + *x * w;
                w = w * row;
            }
            row = row * w_inv;
            acc
        })
        .collect()
}

/// `(φ ⋆ ψ)_n = Σ_ι φ_ι ψ_(n-ι)` by the schoolbook sum.
pub fn convolution_oracle(phi: &[FieldElement], psi: &[FieldElement]) -> Vec<FieldElement> {
    let n = phi.len();
    let field = phi[0].field();
    (0..n)
        .map(|k| (0..n).fold(field.zero(), |acc, i| acc + phi[i] * psi[(k + n - i) % n]))
        .collect()
}

/// `N Σ_{n+m+ℓ ≡ 0} u_n v_m w_ℓ`; the full triple loop for short sequences.
pub fn triple_oracle(u: &[FieldElement], v: &[FieldElement], w: &[FieldElement]) -> FieldElement {
    let n = u.len();
    let field = u[0].field();
    let mut acc = field.zero();
    for a in 0..n {
        for b in 0..n {
            if n <= 32 {
                for (c, wc) in w.iter().enumerate() {
                    if (a + b + c) % n == 0 {
                        acc = acc + u[a] * v[b] * *wc;
                    }
                }
            } else {
                acc = acc + u[a] * v[b] * w[(2 * n - a - b) % n];
            }
        }
    }
    acc * field.element(n as u64)
}

/// Direct `N⁻¹ Σ_n ω^((κ-κ')n)` for every pair, independent of the library.
fn orthogonality_oracle(root: FieldElement, n: usize) -> bool {
    let field = root.field();
    let n_inv = field.element(n as u64).inv().expect("N < p");
    (0..n).all(|k| {
        (0..n).all(|k2| {
            let step = root.pow(((k + n - k2) % n) as u64);
            let mut s = field.zero();
            let mut t = field.one();
            for _ in 0..n {
                s = s + t;
                t = t * step;
            }
            s * n_inv == if k == k2 { field.one() } else { field.zero() }
        })
    })
}

struct Tally {
    checks: Vec<NttCheck>,
}

impl Tally {
    fn record(&mut self, name: &'static str, description: &'static str, results: impl IntoIterator<Item = bool>) {
        let (mut cases, mut failures) = (0, 0);
        for ok in results {
            cases += 1;
            failures += usize::from(!ok);
        }
        self.checks.push(NttCheck {
            name,
            description,
            cases,
            failures,
            passed: failures == 0 && cases > 0,
        });
    }
}

/// Runs every check; the caller has already validated that `length | p - 1`.
pub fn run_checks(field: PrimeField, length: usize, trials: usize, seed: u64) -> Vec<NttCheck> {
    let root = field.find_root_of_unity(length as u64).expect("validated length");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = || {
        let v = (0..length).map(|_| field.random(&mut rng)).collect();
        DftSequence::new(v, root).expect("root has order N")
    };
    let pairs: Vec<(DftSequence, DftSequence)> = (0..trials).map(|_| (random(), random())).collect();
    let thirds: Vec<DftSequence> = (0..trials).map(|_| random()).collect();
    let n_elem = field.element(length as u64);
    let n_inv = n_elem.inv().expect("N < p");
    let mut t = Tally { checks: Vec::new() };

    let zero = DftSequence::new(vec![field.zero(); length], root).expect("valid");
    let delta = zero.delta_like(0);
    let ones = DftSequence::new(vec![field.one(); length], root).expect("valid");
    t.record(
        "delta-and-constant",
        "delta ↦ all ones, all ones ↦ N·delta",
        [
            dft_forward(&delta) == ones,
            dft_forward(&ones) == delta.scale(n_elem),
            conjugate_transform(&delta) == ones,
        ],
    );
    t.record(
        "forward-oracle",
        "forward transform equals the definitional sum",
        pairs
            .iter()
            .map(|(f, _)| dft_forward(f).values() == forward_oracle(f.values(), root).as_slice() && dft_forward_naive(f) == dft_forward(f)),
    );
    t.record(
        "round-trip",
        "inverse after forward is the identity, fast and definitional paths",
        pairs
            .iter()
            .map(|(f, _)| dft_inverse(&dft_forward(f)) == *f && dft_inverse_naive(&dft_forward_naive(f)) == *f),
    );
    let ortho = if length <= 32 {
        vec![orthogonality_holds(root, length), orthogonality_oracle(root, length)]
    } else {
        vec![orthogonality_holds(root, length)]
    };
    t.record("orthogonality", "N⁻¹ Σ_n ω^((κ-κ')n) = [κ = κ']", ortho);
    t.record(
        "periodic-indexing",
        "indices wrap modulo N",
        pairs.iter().map(|(f, _)| {
            let n = length as i64;
            (0..n).all(|k| f.at(k + n) == f.at(k) && f.at(k - n) == f.at(k)) && f.at(-1) == f.at(n - 1)
        }),
    );
    t.record(
        "conjugate-reversal",
        "conjugate transform is the forward transform at -κ; applied twice gives N·reversal",
        pairs.iter().map(|(f, _)| {
            conjugate_transform(f) == dft_forward(f).reversed()
                && conjugate_transform(&conjugate_transform(f)) == f.reversed().scale(n_elem)
        }),
    );
    t.record(
        "parseval",
        "Σ A_κ B̄_κ = N Σ φ_n ψ_n",
        pairs.iter().map(|(f, g)| {
            let (lhs, rhs) = parseval_discrete(f, g).expect("compatible");
            let a = forward_oracle(f.values(), root);
            let b_bar = forward_oracle(g.values(), root.inv().expect("unit"));
            let direct = a.iter().zip(&b_bar).fold(field.zero(), |s, (x, y)| s + *x * *y);
            let dot = f.values().iter().zip(g.values()).fold(field.zero(), |s, (x, y)| s + *x * *y);
            lhs == rhs && lhs == direct && rhs == dot * n_elem
        }),
    );
    t.record(
        "cyclic-convolution",
        "cyclic convolution equals the schoolbook sum",
        pairs.iter().map(|(f, g)| {
            cyclic_convolve(f, g).expect("compatible").values() == convolution_oracle(f.values(), g.values()).as_slice()
        }),
    );
    t.record(
        "convolution-theorem",
        "F[φ⋆ψ] = A·B",
        pairs.iter().map(|(f, g)| {
            let conv = convolution_oracle(f.values(), g.values());
            let lhs = forward_oracle(&conv, root);
            let (a, b) = (forward_oracle(f.values(), root), forward_oracle(g.values(), root));
            lhs.iter().zip(a.iter().zip(&b)).all(|(l, (x, y))| *l == *x * *y)
        }),
    );
    t.record(
        "convolution-duality",
        "F[φ·ψ] = N⁻¹ (A⋆B)",
        pairs.iter().map(|(f, g)| {
            let prod: Vec<FieldElement> = f.values().iter().zip(g.values()).map(|(x, y)| *x * *y).collect();
            let lhs = forward_oracle(&prod, root);
            let (a, b) = (forward_oracle(f.values(), root), forward_oracle(g.values(), root));
            lhs.iter().zip(convolution_oracle(&a, &b)).all(|(l, r)| *l == r * n_inv)
        }),
    );
    t.record(
        "triple-product",
        "Σ_κ U V W = N Σ_{n+m+ℓ≡0} u v w",
        pairs.iter().zip(&thirds).map(|((u, v), w)| {
            let (fu, fv, fw) = (dft_forward(u), dft_forward(v), dft_forward(w));
            triple_product_sum(&fu, &fv, &fw).expect("compatible") == triple_oracle(u.values(), v.values(), w.values())
        }),
    );
    t.checks
}
