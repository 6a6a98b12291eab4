use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use symrig::gaingraph::{lift_cover, multiply_edges, GainGraph};
use symrig::genframe::{lift_bars, random_generic_bars, GenericSeed, PRNG_NAME};
use symrig::hinge::{analyze_hinge_configuration, hinge_to_bars, lift_hinges, random_generic_hinges, HingeConfiguration};
use symrig::matroid::{check_counting_condition, combinatorial_verdict, CombinatorialVerdict};
use symrig::pipeline::{analyze_generic, run_crosscheck, InstanceParams};
use symrig::algebra::binomial;
use symrig::rigidity::{analyze_irreps, extract_flex, verify_flex, BarConfiguration, IrrepReport};
use symrig::scalar::{Field, Rational};
use symrig::schema::{parse_irrep, Framework, Model};
use symrig::symmetry::{presets, GroupElement, PointRepresentation};
use symrig::Error;

use crate::render::{self, Counting};
use crate::{Format, Job};

pub const RIGID: u8 = 0;
pub const FLEXIBLE: u8 = 1;

pub struct Output {
    pub text: String,
    pub code: u8,
}

pub struct CliError {
    pub error: Error,
    /// Report to print before the error, for failures found after analysis.
    pub partial: Option<String>,
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError { error, partial: None }
    }
}

type Outcome = Result<Output, CliError>;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) => 3,
        _ => 2,
    }
}

fn verdict_code(rigid: bool) -> u8 {
    if rigid {
        RIGID
    } else {
        FLEXIBLE
    }
}

fn load(job: &Job, path: &Path) -> Result<Framework, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let framework = Framework::from_json(&text)?;
    if let Some(d) = job.dim {
        if d != framework.rep.dim() {
            return Err(Error::Dimension {
                expected: d,
                found: framework.rep.dim(),
            });
        }
    }
    Ok(framework)
}

fn selected_irreps(job: &Job, rep: &PointRepresentation) -> Result<Vec<GroupElement>, Error> {
    let group = rep.group();
    if job.irreps.is_empty() {
        return Ok(group.elements());
    }
    let mut chosen: Vec<GroupElement> = Vec::new();
    for text in &job.irreps {
        let g = parse_irrep(group, text)?;
        if !chosen.contains(&g) {
            chosen.push(g);
        }
    }
    chosen.sort_by_key(|g| group.index_of(g));
    Ok(chosen)
}

fn emit(job: &Job, value: &Value, text: String) -> String {
    match job.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => text,
    }
}

fn counting_for(job: &Job, v: &CombinatorialVerdict) -> Result<Counting, Error> {
    if !job.oracle {
        return Ok(Counting::NotRequested);
    }
    let all: Vec<usize> = (0..v.edge_count).collect();
    match check_counting_condition(&v.signed_graphs, &all) {
        Ok(None) => Ok(Counting::Ok),
        Ok(Some(violation)) => Ok(Counting::Violated(violation)),
        Err(Error::SizeGuard { size, .. }) => Ok(Counting::Skipped(size)),
        Err(e) => Err(e),
    }
}

/// Verdicts for the selected irreps, or `None` if the representation is not
/// a diagonal sign representation of `(Z/2Z)^l`.
fn verdicts(
    job: &Job,
    graph: &GainGraph,
    rep: &PointRepresentation,
    irreps: &[GroupElement],
) -> Result<Option<Vec<(CombinatorialVerdict, Counting)>>, Error> {
    if rep.require_combinatorial().is_err() {
        return Ok(None);
    }
    irreps
        .iter()
        .map(|g| {
            let v = combinatorial_verdict(graph, rep, g, false)?;
            let c = counting_for(job, &v)?;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>, Error>>()
        .map(Some)
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::BodyBar => "body-bar",
        Model::BodyHinge => "body-hinge",
    }
}

/// The bar framework actually analyzed: the input bars, or the bars
/// equivalent to the hinges on the multiplied graph.
struct BarProblem {
    graph: GainGraph,
    config: BarConfiguration,
    generic: bool,
    seeds: Vec<u64>,
}

fn hinge_configuration(fw: &Framework, seed: GenericSeed) -> Result<(HingeConfiguration, bool), Error> {
    match &fw.hinges {
        Some(h) => Ok((h.clone(), false)),
        None => Ok((random_generic_hinges(&fw.graph, &fw.rep, seed)?, true)),
    }
}

fn bar_problem(job: &Job, fw: &Framework, irreps: &[GroupElement]) -> Result<BarProblem, Error> {
    let seed = GenericSeed::new(job.seed);
    match fw.model {
        Model::BodyBar => match &fw.bars {
            Some(config) => Ok(BarProblem {
                graph: fw.graph.clone(),
                config: config.clone(),
                generic: false,
                seeds: Vec::new(),
            }),
            None => {
                let g = analyze_generic(&fw.graph, &fw.rep, seed, irreps)?;
                Ok(BarProblem {
                    graph: fw.graph.clone(),
                    config: g.config,
                    generic: true,
                    seeds: g.seeds.to_vec(),
                })
            }
        },
        Model::BodyHinge => {
            let (hinges, generic) = hinge_configuration(fw, seed)?;
            let (graph, config) = hinge_to_bars(&fw.graph, &hinges, seed.next())?;
            Ok(BarProblem {
                graph,
                config,
                generic,
                seeds: vec![seed.seed, seed.next().seed],
            })
        }
    }
}

type AnalyzeParts = (Vec<IrrepReport>, Option<Vec<(CombinatorialVerdict, Counting)>>, bool, Vec<u64>, bool);

pub fn analyze(job: &Job, input: &Path) -> Outcome {
    let fw = load(job, input)?;
    let irreps = selected_irreps(job, &fw.rep)?;
    let seed = GenericSeed::new(job.seed);
    let d = fw.rep.dim();

    let (reports, combinatorial, generic, seeds, seeds_agree): AnalyzeParts = match fw.model {
        Model::BodyBar => {
            let (report, generic, seeds, agree) = match &fw.bars {
                Some(config) => (analyze_irreps(&fw.graph, config, &fw.rep, &irreps)?, false, Vec::new(), true),
                None => {
                    let g = analyze_generic(&fw.graph, &fw.rep, seed, &irreps)?;
                    (g.report, true, g.seeds.to_vec(), g.agree)
                }
            };
            let comb = verdicts(job, &fw.graph, &fw.rep, &irreps)?;
            (report.irreps, comb, generic, seeds, agree)
        }
        Model::BodyHinge => {
            let (hinges, generic) = hinge_configuration(&fw, seed)?;
            let hr = analyze_hinge_configuration(&fw.graph, &hinges, &fw.rep, seed.next(), false)?;
            let reports: Vec<IrrepReport> = hr
                .numeric
                .irreps
                .into_iter()
                .filter(|r| irreps.contains(&r.irrep))
                .collect();
            let comb = verdicts(job, &hr.multiplied, &fw.rep, &irreps)?;
            (reports, comb, generic, vec![seed.seed, seed.next().seed], true)
        }
    };

    let mut problems = Vec::new();
    if let Some(comb) = &combinatorial {
        for ((v, _), r) in comb.iter().zip(&reports) {
            // equal at a generic configuration, bounded by the union rank elsewhere
            let bad = if generic { r.rank != v.rank } else { r.rank > v.rank };
            if bad {
                problems.push(format!(
                    "irrep {}: orbit rank {} but union rank {}",
                    r.irrep, r.rank, v.rank
                ));
            }
        }
    }

    let total_flex: usize = reports.iter().map(|r| r.flex).sum();
    let rigid = total_flex == 0;
    let value = json!({
        "model": model_name(fw.model),
        "d": d,
        "vertices": fw.graph.vertex_count(),
        "edges": fw.graph.edge_count(),
        "configuration": if generic { "generic" } else { "explicit" },
        "prng": PRNG_NAME,
        "seeds": seeds,
        "seedsAgree": seeds_agree,
        "irreps": reports.iter().map(render::irrep_report).collect::<Vec<_>>(),
        "combinatorial": combinatorial.as_ref().map(|c| c.iter().map(|(v, k)| render::verdict(d, v, k)).collect::<Vec<_>>()),
        "consistent": problems.is_empty(),
        "totalFlex": total_flex,
        "rigid": rigid,
    });
    let mut text = format!(
        "{} framework, d = {d}, {} vertices, {} edges ({} configuration)\n",
        model_name(fw.model),
        fw.graph.vertex_count(),
        fw.graph.edge_count(),
        if generic { "generic" } else { "explicit" }
    );
    for r in &reports {
        text.push_str(&render::text_irrep(r));
    }
    for (v, c) in combinatorial.iter().flatten() {
        text.push_str(&render::text_verdict(v, c));
    }
    for p in &problems {
        text.push_str(&format!("inconsistent: {p}\n"));
    }
    text.push_str(&format!(
        "{} (total flex {total_flex})\n",
        if rigid { "rigid" } else { "flexible" }
    ));
    let text = emit(job, &value, text);
    if !problems.is_empty() {
        return Err(CliError {
            error: Error::Consistency(problems.join("; ")),
            partial: Some(text),
        });
    }
    Ok(Output {
        text,
        code: verdict_code(rigid),
    })
}

pub fn certify(job: &Job, input: &Path) -> Outcome {
    let fw = load(job, input)?;
    fw.rep.require_combinatorial()?;
    let irreps = selected_irreps(job, &fw.rep)?;
    let d = fw.rep.dim();
    let graph = match fw.model {
        Model::BodyBar => fw.graph.clone(),
        Model::BodyHinge => {
            if fw.graph.has_nonfree_loops() {
                return Err(Error::Unsupported(
                    "body-hinge analysis needs a free action on the edges (L must be empty)".into(),
                )
                .into());
            }
            multiply_edges(&fw.graph, binomial(d + 1, 2) - 1)?
        }
    };
    let certs = verdicts(job, &graph, &fw.rep, &irreps)?.expect("checked above");
    for (v, _) in &certs {
        v.decomposition.validate(&v.signed_graphs)?;
    }
    let rigid = certs.iter().all(|(v, _)| v.rigid);
    let value = json!({
        "model": model_name(fw.model),
        "d": d,
        "certificates": certs.iter().map(|(v, c)| render::verdict(d, v, c)).collect::<Vec<_>>(),
        "rigid": rigid,
    });
    let mut text = String::new();
    for (v, c) in &certs {
        text.push_str(&render::text_verdict(v, c));
        for (label, part) in v.labelled_parts(d) {
            let ids: Vec<String> = part.iter().map(|e| e.0.to_string()).collect();
            text.push_str(&format!("  {label}: [{}]\n", ids.join(", ")));
        }
    }
    Ok(Output {
        text: emit(job, &value, text),
        code: verdict_code(rigid),
    })
}

fn flex_in<T: Field>(p: &BarProblem, rep: &PointRepresentation, g: &GroupElement) -> Result<Value, Error> {
    match extract_flex::<T>(&p.graph, &p.config, rep, g)? {
        None => Ok(json!({"irrep": render::irrep(g), "field": T::NAME, "count": 0, "motions": []})),
        Some(f) => {
            if !verify_flex(&p.graph, &p.config, rep, &f)? {
                return Err(Error::Consistency(format!("flex for irrep {g} violates a bar constraint")));
            }
            Ok(render::flex(&p.graph, &f, rep.dim()))
        }
    }
}

pub fn flex(job: &Job, input: &Path) -> Outcome {
    let fw = load(job, input)?;
    let irreps = selected_irreps(job, &fw.rep)?;
    let problem = bar_problem(job, &fw, &irreps)?;
    let flexes = irreps
        .iter()
        .map(|g| {
            if fw.rep.group().is_real_character(g) {
                flex_in::<Rational>(&problem, &fw.rep, g)
            } else {
                flex_in::<Complex64>(&problem, &fw.rep, g)
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let total: u64 = flexes.iter().map(|f| f["count"].as_u64().unwrap_or(0)).sum();
    let bar_framework = Framework {
        model: Model::BodyBar,
        rep: fw.rep.clone(),
        graph: problem.graph.clone(),
        bars: Some(problem.config.clone()),
        hinges: None,
    };
    let value = json!({
        "model": model_name(fw.model),
        "configuration": if problem.generic { "generic" } else { "explicit" },
        "seeds": problem.seeds,
        "framework": serde_json::to_value(bar_framework.to_document()).expect("serializable"),
        "flexes": flexes,
        "totalFlex": total,
    });
    let mut text = String::new();
    for f in &flexes {
        text.push_str(&format!("irrep {}: {} nontrivial flex(es) ({})\n", f["irrep"], f["count"], f["field"].as_str().unwrap_or_default()));
        for (m, motion) in f["motions"].as_array().into_iter().flatten().enumerate() {
            text.push_str(&format!("  motion {m}: {motion}\n"));
        }
    }
    Ok(Output {
        text: emit(job, &value, text),
        code: verdict_code(total == 0),
    })
}

pub fn lift(job: &Job, input: &Path) -> Outcome {
    let fw = load(job, input)?;
    let seed = GenericSeed::new(job.seed);
    let cover = lift_cover(&fw.graph);
    let names = cover.vertex_names();
    let edges: Vec<Value> = cover
        .edges()
        .iter()
        .map(|ce| {
            let (pos, gamma) = ce.lift.as_ref().expect("lifted edge");
            json!({
                "tail": names[ce.u],
                "head": names[ce.v],
                "orbit": fw.graph.edges()[*pos].id.0,
                "element": gamma.0,
            })
        })
        .collect();
    let (key, extensors): (&str, Vec<Value>) = match fw.model {
        Model::BodyBar => {
            let config = match &fw.bars {
                Some(c) => c.clone(),
                None => random_generic_bars(&fw.graph, &fw.rep, seed)?,
            };
            let (_, lifted) = lift_bars(&fw.graph, &config, &fw.rep)?;
            let bars = lifted
                .bars()
                .iter()
                .map(|b| {
                    let mut v = json!({"plucker": render::rationals(b.extensor.coords())});
                    if let Some((p, q)) = &b.points {
                        v["points"] = json!([render::rationals(p), render::rationals(q)]);
                    }
                    v
                })
                .collect();
            ("bars", bars)
        }
        Model::BodyHinge => {
            let (hinges, _) = hinge_configuration(&fw, seed)?;
            let lifted = lift_hinges(&fw.graph, &hinges, &fw.rep);
            ("hinges", lifted.iter().map(|x| json!({"plucker": render::rationals(x.coords())})).collect())
        }
    };
    let value = json!({
        "model": model_name(fw.model),
        "vertices": names,
        "edges": edges,
        "freeOnVertices": cover.is_free_on_vertices(),
        "freeOnEdges": cover.is_free_on_edges(),
        key: extensors,
    });
    let mut text = format!("{} vertices, {} edges\n", names.len(), edges.len());
    for (e, x) in edges.iter().zip(&extensors) {
        text.push_str(&format!(
            "{} -- {}  {}\n",
            e["tail"].as_str().unwrap_or_default(),
            e["head"].as_str().unwrap_or_default(),
            x["plucker"]
        ));
    }
    Ok(Output {
        text: emit(job, &value, text),
        code: 0,
    })
}

pub fn crosscheck(
    job: &Job,
    count: usize,
    max_vertices: usize,
    max_edges: usize,
    group: &str,
    require_l: bool,
) -> Outcome {
    if let Some(d) = job.dim {
        if d != 3 {
            return Err(Error::Unsupported(format!("crosscheck groups are defined for d = 3, not {d}")).into());
        }
    }
    let rep = presets::all_elementary_d3()
        .into_iter()
        .find(|(name, _)| *name == group)
        .map(|(_, rep)| rep)
        .ok_or_else(|| {
            let known: Vec<&str> = presets::all_elementary_d3().iter().map(|(n, _)| *n).collect();
            Error::Input(format!("unknown group {group:?}; expected one of {}", known.join(", ")))
        })?;
    if max_vertices == 0 {
        return Err(Error::Input("max-vertices must be at least 1".into()).into());
    }
    let params = InstanceParams {
        max_vertices,
        max_edges,
        allow_l: true,
        require_l,
    };
    let summary = run_crosscheck(count, params, &rep, job.seed)?;
    let value = serde_json::to_value(&summary).expect("serializable");
    let mut text = format!(
        "instances            {}\nadditivity failures  {}\nmatroid failures     {}\nseed disagreements   {}\n",
        summary.instances, summary.additivity_failures, summary.matroid_failures, summary.seed_disagreements
    );
    for m in &summary.mismatches {
        text.push_str(&format!("instance {} (seed {}): {}\n", m.index, m.seed, m.reason));
    }
    let text = emit(job, &value, text);
    if !summary.passed() {
        return Err(CliError {
            error: Error::Consistency(format!("{} mismatching instances", summary.mismatches.len())),
            partial: Some(text),
        });
    }
    Ok(Output { text, code: 0 })
}
