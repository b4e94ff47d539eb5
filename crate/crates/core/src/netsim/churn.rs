use rand::Rng;

use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChurnEvent<T = NodeId> {
    Off(T),
    On(T),
}

/// One simulated second of churn: every on-line node leaves with `p_off`,
/// every off-line node comes back with `p_on`.
pub fn churn_step<T: Copy, R: Rng + ?Sized>(
    rng: &mut R,
    p_off: f64,
    p_on: f64,
    online: &[T],
    offline: &[T],
) -> Vec<ChurnEvent<T>> {
    let mut out = Vec::new();
    for &v in online {
        if rng.gen_bool(p_off) {
            out.push(ChurnEvent::Off(v));
        }
    }
    for &v in offline {
        if rng.gen_bool(p_on) {
            out.push(ChurnEvent::On(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ids: Vec<NodeId> = (0..10).map(NodeId).collect();
        assert!(churn_step(&mut rng, 0.0, 0.0, &ids, &ids).is_empty());
        let all = churn_step::<NodeId, _>(&mut rng, 1.0, 0.0, &ids, &[]);
        assert_eq!(all.len(), 10);
    }

    #[test]
    fn departure_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ids: Vec<NodeId> = (0..100).map(NodeId).collect();
        let mut off = 0;
        for _ in 0..100 {
            off += churn_step::<NodeId, _>(&mut rng, 0.1, 0.0, &ids, &[]).len();
        }
        let rate = off as f64 / 10_000.0;
        assert!((rate - 0.1).abs() <= 0.01, "rate {rate}");
    }
}
