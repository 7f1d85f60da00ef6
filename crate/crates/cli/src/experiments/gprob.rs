use dimech_core::gprob::{born, chain, classical_from_pairs, normalize, Amplitude, GState, PairSpace};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GprobBorn {
    pub seed: u64,
    pub triples: usize,
    pub states: usize,
    pub max_events: usize,
    pub pair_spaces: usize,
    pub max_pair_side: usize,
}

impl Default for GprobBorn {
    fn default() -> Self {
        Self {
            seed: 7,
            triples: 1000,
            states: 200,
            max_events: 12,
            pair_spaces: 100,
            max_pair_side: 6,
        }
    }
}

fn amplitude(rng: &mut ChaCha8Rng) -> Amplitude {
    Amplitude::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

impl GprobBorn {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("triples", self.triples, 1, 1_000_000);
        issues.within("states", self.states, 1, 100_000);
        issues.within("max_events", self.max_events, 1, 1024);
        issues.within("pair_spaces", self.pair_spaces, 1, 100_000);
        issues.within("max_pair_side", self.max_pair_side, 1, 64);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Outcome::default();

        let mut assoc = 0.0f64;
        let mut mult = 0.0f64;
        for _ in 0..self.triples {
            let (a, b, c) = (amplitude(&mut rng), amplitude(&mut rng), amplitude(&mut rng));
            let l = chain(chain(a, b), c);
            let r = chain(a, chain(b, c));
            assoc = assoc.max((l.u - r.u).abs()).max((l.v - r.v).abs());
            mult = mult.max((chain(a, b).magnitude() - a.magnitude() * b.magnitude()).abs());
        }

        let mut states = Table::new(
            "states",
            &[
                ("state", "1"),
                ("events", "1"),
                ("total_probability", "1"),
                ("deviation", "1"),
            ],
        );
        let mut born_dev = 0.0f64;
        for s in 0..self.states {
            let k = rng.gen_range(1..=self.max_events);
            let raw = GState::from_pairs((0..k).map(|i| (format!("e{i}"), amplitude(&mut rng))));
            let Ok(state) = normalize(&raw) else { continue };
            let space = born(&state)?;
            let dev = (space.total() - 1.0).abs();
            born_dev = born_dev.max(dev);
            states.push(vec![s.into(), k.into(), space.total().into(), dev.into()]);
        }

        let mut pairs = Table::new(
            "pairs",
            &[
                ("space", "1"),
                ("rows", "1"),
                ("cols", "1"),
                ("total_probability", "1"),
                ("min_probability", "1"),
                ("additivity_defect", "1"),
            ],
        );
        let mut pair_dev = 0.0f64;
        let mut min_p = f64::INFINITY;
        for s in 0..self.pair_spaces {
            let ka = rng.gen_range(1..=self.max_pair_side);
            let kb = rng.gen_range(1..=self.max_pair_side);
            let ps = PairSpace::from_fn(ka, kb, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let Ok(ps) = ps.normalized() else { continue };
            let space = classical_from_pairs(&ps)?;
            let events = space.events().to_vec();
            let (left, right) = events.split_at(events.len() / 2);
            let additivity =
                (space.prob_of_union(left) + space.prob_of_union(right) - space.prob_of_union(&events)).abs();
            let lowest = events
                .iter()
                .filter_map(|e| space.prob(e))
                .fold(f64::INFINITY, f64::min);
            pair_dev = pair_dev.max((space.total() - 1.0).abs()).max(additivity);
            min_p = min_p.min(lowest);
            pairs.push(vec![
                s.into(),
                ka.into(),
                kb.into(),
                space.total().into(),
                lowest.into(),
                additivity.into(),
            ]);
        }

        out.checks.push(Check::below("chain_associativity", assoc, 1e-14));
        out.checks.push(Check::below("magnitude_multiplicativity", mult, 1e-14));
        out.checks.push(Check::below("born_total_deviation", born_dev, 1e-12));
        out.checks.push(Check::below("pair_measure_deviation", pair_dev, 1e-12));
        out.checks.push(Check::at_least("pair_min_probability", min_p, 0.0));
        out.tables.push(states);
        out.tables.push(pairs);
        Ok(out)
    }
}
