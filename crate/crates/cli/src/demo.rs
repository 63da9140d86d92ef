//! The end-to-end pipeline: group, tree, stabilization, sphere actions,
//! invariant orders and the tree-product separation.

use hnntree::bass_serre::{expand_ball, find_generic_element};
use hnntree::coarse::{build_grid, build_tree_product, Profile};
use hnntree::cyclic::{search_invariant_order, sphere_permutation, RespectType, SearchMode, Verdict};
use hnntree::hnn::{validate_group, GroupData};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::config::{CoarseModel, RunConfig};
use crate::error::CliError;
use crate::json::{matrix_from_json, ClassificationJson, GroupSummary, Int, Rat, StabilizationJson};

pub const NO_GROWTH_NOTE: &str = "no growth; obstruction machinery vacuous";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub settings: Settings,
    pub classification: ClassificationJson,
    pub group: GroupSummary,
    pub tree: TreeSummary,
    pub stabilization: StabilizationSummary,
    pub spheres: Vec<SphereSummary>,
    pub coarse: CoarseSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub radius: usize,
    pub depth: usize,
    pub solver_cap: usize,
    pub point_cap: usize,
    pub coarse: CoarseModel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSummary {
    /// Valence of the base vertex.
    pub degree: usize,
    /// `|B(v0, r)|` for `r = 0..=radius`.
    pub ball_sizes: Vec<usize>,
    pub sphere_sizes: Vec<usize>,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationSummary {
    pub report: StabilizationJson,
    pub growth: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub mode: String,
    pub verdict: String,
    pub nodes_explored: Option<u64>,
    pub signs: Option<Vec<String>>,
    /// Sphere points in the witness order, starting from point 0.
    pub witness: Option<Vec<usize>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSummary {
    pub depth: usize,
    pub size: usize,
    pub cycle_type: Vec<usize>,
    pub solver: Vec<SolverSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub size: usize,
    pub depth: Option<Rat>,
    pub deep: bool,
    /// `ρ(r)` for `r = 1..=profile_max`; `null` is unbounded.
    pub profile: Vec<Option<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseSummary {
    pub points: usize,
    pub subset_size: usize,
    pub r: Rat,
    pub s: Rat,
    pub r_deep: Rat,
    pub components: Vec<ComponentSummary>,
    pub deep_count: usize,
    pub class_dimension: usize,
    /// Every profile value satisfies `ρ(r) <= r + 2`.
    pub uniform: bool,
}

fn sign_name(s: RespectType) -> String {
    match s {
        RespectType::Preserves => "preserves",
        RespectType::Reverses => "reverses",
        RespectType::Neither => "neither",
    }
    .to_string()
}

pub fn build_group(cfg: &crate::json::GroupJson) -> Result<GroupData, CliError> {
    let a = matrix_from_json(&cfg.a)?;
    validate_group(cfg.n, a, &cfg.generators()?).map_err(|e| CliError::stage("validate_group", e))
}

/// Vertex count of a ball of the given radius in a tree of constant degree.
pub fn estimated_ball_size(degree: u64, radius: usize) -> u64 {
    let mut total = 1u64;
    let mut sphere = 1u64;
    for i in 0..radius {
        sphere = sphere.saturating_mul(if i == 0 { degree } else { degree.saturating_sub(1) });
        total = total.saturating_add(sphere);
    }
    total
}

pub fn run_demo(cfg: &RunConfig) -> Result<DemoReport, CliError> {
    let g = build_group(&cfg.group)?;
    let classification = ClassificationJson::from(g.classification());

    let degree = (g.index_prime() + g.index_doubleprime()).to_u64().unwrap_or(u64::MAX);
    let estimate = estimated_ball_size(degree, cfg.radius);
    if estimate > cfg.point_cap as u64 {
        return Err(CliError::Precondition(format!(
            "ball of radius {} would have {estimate} vertices, above point_cap {}",
            cfg.radius, cfg.point_cap
        )));
    }
    let ball_sizes = (0..=cfg.radius).map(|r| expand_ball(&g, r).len()).collect();
    let ball = expand_ball(&g, cfg.radius);
    let tree = TreeSummary {
        degree: ball.neighbors(0).len(),
        ball_sizes,
        sphere_sizes: ball.sphere_sizes(),
        edges: ball.edge_count(),
    };

    let generic = find_generic_element(&g, cfg.depth);
    let stabilization = StabilizationSummary {
        report: StabilizationJson::from(&generic.report),
        growth: generic.growth,
        note: (!generic.growth).then(|| NO_GROWTH_NOTE.to_string()),
    };

    let a = g.abelian(generic.element.clone()).map_err(|e| CliError::stage("sphere_permutation", e))?;
    let mut spheres = Vec::new();
    for depth in 1..=cfg.radius {
        let sp = sphere_permutation(&ball, &a, depth).map_err(|e| CliError::stage("sphere_permutation", e))?;
        let size = sp.permutation.len();
        let mut solver = Vec::new();
        for (mode, name) in [(SearchMode::PreserveOnly, "preserve"), (SearchMode::Respect, "respect")] {
            let skip = if size < 3 {
                Some("fewer than 3 points".to_string())
            } else if size > cfg.solver_cap {
                Some(format!("sphere size {size} exceeds solver_cap {}", cfg.solver_cap))
            } else {
                None
            };
            if let Some(reason) = skip {
                solver.push(SolverSummary {
                    mode: name.into(),
                    verdict: "skipped".into(),
                    nodes_explored: None,
                    signs: None,
                    witness: None,
                    reason: Some(reason),
                });
                continue;
            }
            let res = search_invariant_order(size, std::slice::from_ref(&sp.permutation), mode)
                .map_err(|e| CliError::stage("search_invariant_order", e))?;
            let (verdict, witness) = match &res.verdict {
                Verdict::Satisfiable(o) => ("satisfiable", Some(o.arrangement())),
                Verdict::Unsatisfiable { .. } => ("unsatisfiable", None),
            };
            solver.push(SolverSummary {
                mode: name.into(),
                verdict: verdict.into(),
                nodes_explored: Some(res.nodes_explored),
                signs: res.signs.map(|s| s.into_iter().map(sign_name).collect()),
                witness,
                reason: None,
            });
        }
        spheres.push(SphereSummary { depth, size, cycle_type: sp.cycle_type, solver });
    }

    let coarse = coarse_model(&g, &cfg.coarse, cfg.point_cap)?;

    Ok(DemoReport {
        settings: Settings {
            radius: cfg.radius,
            depth: cfg.depth,
            solver_cap: cfg.solver_cap,
            point_cap: cfg.point_cap,
            coarse: cfg.coarse.clone(),
        },
        classification,
        group: GroupSummary::from(&g),
        tree,
        stabilization,
        spheres,
        coarse,
    })
}

pub fn coarse_model(g: &GroupData, m: &CoarseModel, point_cap: usize) -> Result<CoarseSummary, CliError> {
    let stage = |e: hnntree::coarse::CoarseError| CliError::stage("coarse_separation", e);
    let ball = expand_ball(g, m.radius);
    let points = ball.len().saturating_mul(m.path_length);
    if points > point_cap {
        return Err(CliError::Precondition(format!("tree product has {points} points, above point_cap {point_cap}")));
    }
    let path = build_grid(&[m.path_length]).map_err(stage)?;
    let x = build_tree_product(&ball, &path).map_err(stage)?;
    let subset: Vec<usize> =
        ball.axis().iter().flat_map(|&v| (0..m.path_length).map(move |p| v * m.path_length + p)).collect();
    let (r, s) = (m.r.to_rational()?, m.s.to_rational()?);
    let sep = x.separation_analysis(&subset, &r, &s, None).map_err(stage)?;
    let mut uniform = true;
    let mut components = Vec::new();
    for c in &sep.components {
        let profile = x.coarse_complement_profile(&c.points, &subset, m.profile_max).map_err(stage)?;
        for (i, rho) in profile.iter().enumerate() {
            uniform &= rho.bounded_by(i as i64 + 3);
        }
        components.push(ComponentSummary {
            size: c.points.len(),
            depth: c.depth.as_ref().map(Rat::from),
            deep: c.deep,
            profile: profile
                .iter()
                .map(|p| match p {
                    Profile::Bounded(v) => Some(Int::from(v)),
                    Profile::Unbounded => None,
                })
                .collect(),
        });
    }
    Ok(CoarseSummary {
        points: x.len(),
        subset_size: subset.len(),
        r: Rat::from(&sep.r),
        s: Rat::from(&sep.s),
        r_deep: Rat::from(&sep.r_deep),
        components,
        deep_count: sep.deep_count,
        class_dimension: sep.class_dimension,
        uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_estimates() {
        assert_eq!(estimated_ball_size(10, 4), 8201);
        assert_eq!(estimated_ball_size(3, 2), 10);
        assert_eq!(estimated_ball_size(10, 0), 1);
    }
}
