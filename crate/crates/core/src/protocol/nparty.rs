//! Exact `k`-player multiplication in the DFT coefficient domain.
//!
//! Trusty draws random sequences `u_i`, publishes their transforms `U_i` and
//! an `η` with `η·Σ_κ Π_i U_i(κ) = 1`, split multiplicatively as
//! `Π_i η_i = η`. Player `i` scales `U_i` by `a_i·η_i` and hands each node the
//! entries of its index set. Node `j` outputs `Σ_{κ ∈ P_j} Π_i payload_i(κ)`,
//! so the node outputs add up to `Π a_i`.

use rand::Rng;

use super::ProtocolError;
use crate::dft::{dft_forward, product_sum, DftSequence};
use crate::field::{FieldElement, PrimeField};

/// Index sets of the nodes; must be a disjoint cover of `0..N`.
pub type NodePartition = Vec<Vec<usize>>;

/// `κ ↦ κ mod m`. For two nodes this is the even/odd split.
pub fn round_robin_partition(length: usize, nodes: usize) -> NodePartition {
    let mut parts = vec![Vec::new(); nodes];
    for k in 0..length {
        parts[k % nodes].push(k);
    }
    parts
}

pub fn validate_partition(partition: &NodePartition, length: usize) -> Result<(), ProtocolError> {
    if partition.len() < 2 {
        return Err(ProtocolError::InvalidPartition("at least two nodes are required".into()));
    }
    let mut seen = vec![false; length];
    for (j, part) in partition.iter().enumerate() {
        for &k in part {
            if k >= length {
                return Err(ProtocolError::InvalidPartition(format!("node {} holds index {k} >= {length}", j + 1)));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(ProtocolError::InvalidPartition(format!("index {k} assigned twice")));
            }
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(ProtocolError::InvalidPartition(format!("index {k} is not assigned")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NPartyDiscreteParams {
    /// Coefficient-domain masks `U_i`.
    pub masks: Vec<DftSequence>,
    pub eta: FieldElement,
    pub eta_shares: Vec<FieldElement>,
    pub partition: NodePartition,
    pub resamples: u32,
}

impl NPartyDiscreteParams {
    pub fn players(&self) -> usize {
        self.masks.len()
    }

    pub fn nodes(&self) -> usize {
        self.partition.len()
    }

    pub fn length(&self) -> usize {
        self.masks[0].len()
    }

    /// Same masks and shares, different node split.
    pub fn with_partition(&self, partition: NodePartition) -> Result<Self, ProtocolError> {
        validate_partition(&partition, self.length())?;
        Ok(Self {
            partition,
            ..self.clone()
        })
    }

    pub fn check(&self) -> Result<(), ProtocolError> {
        if self.masks.len() < 2 || self.eta_shares.len() != self.masks.len() {
            return Err(ProtocolError::InvalidParams("need k >= 2 masks and one eta share per mask".into()));
        }
        validate_partition(&self.partition, self.length())?;
        let refs: Vec<&DftSequence> = self.masks.iter().collect();
        let total = product_sum(&refs)?;
        let field = self.eta.field();
        if self.eta * total != field.one() {
            return Err(ProtocolError::InvalidParams("eta does not invert the mask product sum".into()));
        }
        let prod = self.eta_shares.iter().fold(field.one(), |acc, x| acc * *x);
        if prod != self.eta {
            return Err(ProtocolError::InvalidParams("eta shares do not multiply to eta".into()));
        }
        Ok(())
    }
}

/// Trusty for `players` inputs over length-`length` sequences. The RNG is
/// consumed only by the masks and `η` shares, never by the partition, so the
/// same seed gives the same masks whatever the number of nodes.
pub fn trusty_offline_np<R: Rng + ?Sized>(
    field: PrimeField,
    players: usize,
    length: usize,
    partition: NodePartition,
    rng: &mut R,
) -> Result<NPartyDiscreteParams, ProtocolError> {
    if players < 2 {
        return Err(ProtocolError::InvalidParams("need at least two players".into()));
    }
    let root = field.find_root_of_unity(length as u64)?;
    validate_partition(&partition, length)?;
    let mut resamples = 0;
    let (masks, eta) = loop {
        let masks = (0..players)
            .map(|_| {
                let u = (0..length).map(|_| field.random(rng)).collect();
                DftSequence::new(u, root).map(|s| dft_forward(&s))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&DftSequence> = masks.iter().collect();
        match product_sum(&refs)?.inv() {
            Ok(eta) => break (masks, eta),
            Err(_) => resamples += 1,
        }
    };
    let mut eta_shares: Vec<FieldElement> = (1..players).map(|_| field.random_nonzero(rng)).collect();
    let rest = eta_shares.iter().fold(field.one(), |acc, x| acc * *x);
    eta_shares.push(eta * rest.inv().expect("nonzero shares"));
    Ok(NPartyDiscreteParams {
        masks,
        eta,
        eta_shares,
        partition,
        resamples,
    })
}

/// What player `i` sends to node `j`: `a_i·η_i·U_i(κ)` for `κ ∈ P_j`.
pub fn player_payload_np(
    secret: FieldElement,
    eta_share: FieldElement,
    mask: &DftSequence,
    indices: &[usize],
) -> Vec<FieldElement> {
    let scale = secret * eta_share;
    indices.iter().map(|&k| scale * mask[k]).collect()
}

/// `Σ_κ Π_i payload_i(κ)` over the node's entries.
pub fn node_output_np(field: PrimeField, payloads: &[&[FieldElement]]) -> Result<FieldElement, ProtocolError> {
    let len = payloads.first().map(|p| p.len()).unwrap_or(0);
    if payloads.iter().any(|p| p.len() != len) {
        return Err(ProtocolError::MalformedMessage("payloads cover different index sets".into()));
    }
    Ok((0..len).fold(field.zero(), |acc, k| {
        acc + payloads.iter().fold(field.one(), |p, v| p * v[k])
    }))
}

/// Node outputs computed by direct function calls, without a transcript.
pub fn run_np_direct(secrets: &[FieldElement], params: &NPartyDiscreteParams) -> Result<Vec<FieldElement>, ProtocolError> {
    if secrets.len() != params.players() {
        return Err(ProtocolError::InvalidParams(format!(
            "{} secrets for {} players",
            secrets.len(),
            params.players()
        )));
    }
    let field = params.eta.field();
    params
        .partition
        .iter()
        .map(|part| {
            let payloads: Vec<Vec<FieldElement>> = secrets
                .iter()
                .zip(params.masks.iter().zip(&params.eta_shares))
                .map(|(a, (u, e))| player_payload_np(*a, *e, u, part))
                .collect();
            let refs: Vec<&[FieldElement]> = payloads.iter().map(|p| p.as_slice()).collect();
            node_output_np(field, &refs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::two_party::reconstruct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partitions() {
        assert_eq!(round_robin_partition(6, 2), vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(validate_partition(&round_robin_partition(8, 3), 8).is_ok());
        assert!(validate_partition(&vec![vec![0, 1], vec![1, 2, 3]], 4).is_err());
        assert!(validate_partition(&vec![vec![0, 1], vec![3]], 4).is_err());
        assert!(validate_partition(&vec![vec![0, 1, 2, 3]], 4).is_err());
        assert!(validate_partition(&vec![vec![0, 1], vec![2, 9]], 4).is_err());
    }

    #[test]
    fn reconstructs_products() {
        let f = PrimeField::new(97).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = trusty_offline_np(f, 3, 8, round_robin_partition(8, 2), &mut rng).unwrap();
        params.check().unwrap();
        let secrets = [f.element(2), f.element(3), f.element(4)];
        let out = run_np_direct(&secrets, &params).unwrap();
        assert_eq!(reconstruct(&out).unwrap().value(), 24);
    }

    #[test]
    fn node_count_does_not_change_the_result() {
        let f = PrimeField::new(17).unwrap();
        let secrets = [f.element(5), f.element(9)];
        let mut sums = Vec::new();
        for m in [2, 3, 5] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let params = trusty_offline_np(f, 2, 8, round_robin_partition(8, m), &mut rng).unwrap();
            sums.push((params.masks.clone(), reconstruct(&run_np_direct(&secrets, &params).unwrap()).unwrap()));
        }
        assert!(sums.iter().all(|s| s == &sums[0]));
        assert_eq!(sums[0].1, f.element(45));
    }

    #[test]
    fn length_must_divide_p_minus_one() {
        let f = PrimeField::new(17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(trusty_offline_np(f, 2, 5, round_robin_partition(5, 2), &mut rng).is_err());
        assert!(trusty_offline_np(f, 1, 8, round_robin_partition(8, 2), &mut rng).is_err());
    }
}
