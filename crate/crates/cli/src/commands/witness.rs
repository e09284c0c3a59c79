use serde_json::json;
use wpo_core::orders::check_linear;
use wpo_core::witnesses::{
    amalgamation_report, coloring_good_pair, random_poset, unary_quasi_embedding, ColoringOrder,
    WitnessError,
};
use wpo_core::{nonunary_witness, Builtin, Code, Dilator, FinPoset, LawBudget};

use super::budgets;
use crate::report::Check;
use crate::{Globals, Outcome};

/// A poset literal with `;` separating lines, e.g. `n=3;0<1;0<2`.
fn parse_poset(s: &str) -> Result<FinPoset, String> {
    s.replace(';', "\n")
        .parse()
        .map_err(|e: wpo_core::OrderError| e.to_string())
}

#[derive(Debug, clap::Subcommand)]
pub enum Which {
    /// The order `i <_α j ⟺ c(i) > c(j) ∨ (c(i) = c(j) ∧ i > j)` for
    /// `c(i) = i mod n`, and the badness of `(i, c(i))` in `α × n`.
    Coloring {
        #[arg(long, default_value_t = 3)]
        colors: u64,
        /// Prefix length scanned for good pairs.
        #[arg(long, default_value_t = 200)]
        len: usize,
    },
    /// An element with two support points, its amalgamation gadget, and the
    /// gadget maps into `N + α_⊥ + X∖{x,y}` on a finite window.
    Nonunary {
        #[arg(long)]
        dilator: Builtin,
        /// Colors of the coloring order driving the window.
        #[arg(long, default_value_t = 3)]
        colors: u64,
        /// Terms of the bad sequence materialized.
        #[arg(long, default_value_t = 24)]
        window: usize,
    },
    /// The quasi embedding of `W(X)` into `(W(0) + W(1)) × X` for unary `W`.
    UnaryEmbed {
        #[arg(long)]
        dilator: Builtin,
        /// Carrier literal, e.g. `n=3;0<1`; random if absent.
        #[arg(long, value_parser = parse_poset)]
        poset: Option<FinPoset>,
        /// Size of the random carrier.
        #[arg(long, default_value_t = 5)]
        poset_size: usize,
        /// Probability that a pair `i < j` of the random carrier is related.
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        /// The designated point for empty-support elements.
        #[arg(long, default_value_t = 0)]
        z: Code,
    },
}

pub fn run(which: &Which, g: &Globals) -> Outcome {
    let budget = LawBudget {
        max_poset_size: g.budget_size,
        max_elements: g.budget_elems,
        seed: g.seed,
        ..LawBudget::default()
    };
    match which {
        Which::Coloring { colors, len } => {
            if *colors == 0 {
                return Err("--colors must be at least 1".into());
            }
            let c = ColoringOrder::modulo(*colors);
            let good = coloring_good_pair(&c, *len);
            let mut bad = Check::new("coloring_bad_prefix", good.is_none())
                .detail(json!({"terms": len, "pairs": len * len.saturating_sub(1) / 2}));
            if let Some((i, j)) = good {
                bad = bad.witness(json!({"i": i, "j": j}));
            }
            let codes: Vec<Code> = (0..100).collect();
            let linear = check_linear(&c.alpha(), &codes);
            let mut lin =
                Check::new("coloring_linear", linear.is_ok()).detail(json!({"codes": 100}));
            if let Err((i, j)) = linear {
                lin = lin.witness(json!({"i": i, "j": j}));
            }
            Ok((
                budgets([("colors", *colors), ("len", *len as u64)]),
                vec![bad, lin],
            ))
        }
        Which::Nonunary {
            dilator,
            colors,
            window,
        } => {
            let found = nonunary_witness(dilator, &budget);
            let mut checks = vec![];
            match &found {
                None => checks
                    .push(Check::new("nonunary_witness", true).detail(json!({"found": false}))),
                Some(wit) => {
                    let supports_differ = dilator.supp(&wit.sigma_x) != dilator.supp(&wit.sigma_y);
                    checks.push(
                        Check::new(
                            "nonunary_witness",
                            supports_differ && wit.sigma_x != wit.sigma_y,
                        )
                        .detail(json!({"found": true, "support": dilator.supp(&wit.sigma)}))
                        .witness(wit),
                    );
                    checks.push(Check::new("gadget_maps_quasi", wit.gadget.maps_are_quasi()));
                    let report =
                        amalgamation_report(dilator, wit, &ColoringOrder::modulo(*colors), *window);
                    checks
                        .push(Check::new("amalgamation_window", report.is_pass()).witness(&report));
                }
            }
            Ok((
                budgets([("colors", *colors), ("window", *window as u64)]),
                checks,
            ))
        }
        Which::UnaryEmbed {
            dilator,
            poset,
            poset_size,
            density,
            z,
        } => {
            let x = poset
                .clone()
                .unwrap_or_else(|| random_poset(*poset_size, *density, g.seed));
            let carrier = json!({"n": x.size(), "lt": x.strict_pairs()});
            let check = match unary_quasi_embedding(dilator, &x, *z, &budget) {
                Ok(emb) => {
                    let images: Vec<String> = emb.images.iter().map(|i| i.to_string()).collect();
                    let pairs = images.len() * images.len();
                    let c = Check::new("unary_quasi_embedding", emb.verdict.is_pass()).detail(
                        json!({"carrier": carrier, "elements": images.len(), "pairs": pairs}),
                    );
                    if emb.verdict.is_pass() {
                        c.witness(json!({"images": images}))
                    } else {
                        c.witness(json!({"images": images, "verdict": emb.verdict}))
                    }
                }
                Err(
                    e @ (WitnessError::NotUnary { .. } | WitnessError::DecompositionFailure { .. }),
                ) => Check::new("unary_quasi_embedding", false)
                    .detail(json!({"carrier": carrier}))
                    .witness(json!({"error": e.to_string()})),
                Err(e) => return Err(format!("--z/--poset: {e}")),
            };
            Ok((budgets([("poset_size", x.size() as u64)]), vec![check]))
        }
    }
}
