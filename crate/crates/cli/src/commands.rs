//! One function per subcommand, generic over the arithmetic.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use mcshane::cantor::{box_dimension_estimate, build_gaps, dimension_series, ratio_convergence_scan, BranchSpec};
use mcshane::export::{node_records, scan_records, to_csv, to_json, DimensionRecord, IntervalRecord};
use mcshane::identity::{interval_layout, mcshane_sum};
use mcshane::render::{render_svg, Layers, SceneSpec, Window};
use mcshane::verify::{run_suite, Fault, VerifyConfig};
use mcshane::{enumerate_tree, FrickeParams, MovePath, Real, Scalar};
use serde::Serialize;

use crate::config::{parse_depths, ConfigError, FileConfig, Format, RunConfig};

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn table<T: Serialize>(rows: &[T], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => Ok(to_csv(rows)?),
        Format::Json => Ok(to_json(rows)?),
        Format::Svg => Err(ConfigError("svg output is only available for render".into()).into()),
    }
}

pub fn identity<S: Scalar>(p: &FrickeParams<S>, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let tol = Real::parse(&cfg.tol, cfg.precision).map_err(|e| ConfigError(format!("--tol: {e}")))?;
    let r = mcshane_sum(p, &cfg.budget, cfg.precision)?;
    let json = to_json(&r)?;
    if cfg.format == Some(Format::Json) && cfg.out.is_none() {
        emit(&None, &json)?;
    } else {
        let mut t = String::new();
        for (k, v) in [
            ("partial_sum", r.partial_sum.to_decimal()),
            ("normalized", r.normalized.to_decimal()),
            ("deficiency", r.deficiency.to_decimal()),
            ("node_count", r.node_count.to_string()),
            ("max_z", r.max_z.clone()),
            ("max_depth", r.max_depth.to_string()),
            ("pruned_nodes", r.pruned_nodes.to_string()),
            ("pruned_bound", r.pruned_bound.to_decimal()),
            ("precision", r.precision.to_string()),
            ("monotone", (r.monotonicity.non_decreasing && r.monotonicity.below_half).to_string()),
        ] {
            t.push_str(&format!("{k:<13} {v}\n"));
        }
        emit(&None, &t)?;
        if cfg.out.is_some() {
            emit(&cfg.out, &json)?;
        }
    }
    if r.deficiency.abs() < tol {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("deficiency {} is not below the tolerance {}", r.deficiency.to_f64(), cfg.tol);
        Ok(ExitCode::from(1))
    }
}

pub fn tree<S: Scalar>(p: &FrickeParams<S>, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let nodes: Vec<_> = enumerate_tree(p, &cfg.budget)?.collect();
    let rows = node_records(&nodes, p, cfg.precision)?;
    emit(&cfg.out, &table(&rows, cfg.format.unwrap_or(Format::Csv))?)?;
    Ok(ExitCode::SUCCESS)
}

pub fn intervals<S: Scalar>(p: &FrickeParams<S>, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let layout = interval_layout(p, &cfg.budget)?;
    layout.check()?;
    let prec = cfg.precision;
    let rows = layout.intervals.iter().map(|iv| IntervalRecord::new(iv, p, prec)).collect::<Result<Vec<_>, _>>()?;
    emit(&cfg.out, &table(&rows, cfg.format.unwrap_or(Format::Csv))?)?;
    eprintln!("intervals     {}", rows.len());
    eprintln!("ambient       [{}, {}]", layout.ambient.lo(prec).to_decimal(), layout.ambient.hi(prec).to_decimal());
    eprintln!("total_excised {}", layout.total_excised(prec).to_decimal());
    eprintln!("verdict       disjoint, contained");
    Ok(ExitCode::SUCCESS)
}

pub fn dimension<S: Scalar>(
    p: &FrickeParams<S>,
    cfg: &RunConfig,
    file: &FileConfig,
    depths: Option<&str>,
    scales: Option<&str>,
) -> anyhow::Result<ExitCode> {
    let depths = match depths {
        Some(d) => parse_depths(d)?,
        None => file.dimension.depths.clone().unwrap_or_else(|| (5..=20).collect()),
    };
    let prec = cfg.precision;
    let format = cfg.format.unwrap_or(Format::Csv);
    let scales: Option<Vec<String>> = match scales {
        Some(s) => Some(s.split(',').map(|t| t.trim().to_string()).collect()),
        None => file.dimension.scales.as_ref().map(|v| v.iter().map(|n| n.text()).collect()),
    };
    if let Some(scales) = scales {
        // fixed scales measure the set at the deepest requested depth
        let deepest = *depths.iter().max().expect("non-empty");
        let g = build_gaps(p, deepest, prec)?;
        let scales = scales
            .iter()
            .map(|s| Real::parse(s, prec).map_err(|e| ConfigError(format!("scale: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let d = box_dimension_estimate(&g, &scales)?;
        let text = match format {
            Format::Json => to_json(&d)?,
            _ => table(&d.rows, format)?,
        };
        emit(&cfg.out, &text)?;
        eprintln!("fit_slope {}", d.fit_slope.to_decimal());
    } else {
        let series = dimension_series(p, &depths, prec)?;
        let rows: Vec<DimensionRecord> = series.iter().map(DimensionRecord::from).collect();
        emit(&cfg.out, &table(&rows, format)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn scan<S: Scalar>(
    p: &FrickeParams<S>,
    cfg: &RunConfig,
    file: &FileConfig,
    prefix: Option<&str>,
    block: Option<&str>,
    iterations: Option<usize>,
) -> anyhow::Result<ExitCode> {
    let prefix: MovePath = prefix.or(file.scan.prefix.as_deref()).unwrap_or("m").parse()?;
    let block = BranchSpec::parse_block(block.or(file.scan.block.as_deref()).unwrap_or("LR"))?;
    let iterations = iterations.or(file.scan.iterations).unwrap_or(20);
    let spec = BranchSpec::new(prefix, block, iterations)?;
    let r = ratio_convergence_scan(&spec, p, cfg.precision)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&r)?,
        f => table(&scan_records(&r), f)?,
    };
    emit(&cfg.out, &text)?;
    eprintln!("last            {}", r.last.to_decimal());
    eprintln!("predicted_limit {}", r.predicted_limit.to_decimal());
    eprintln!("distance        {}", r.distance.to_decimal());
    Ok(ExitCode::SUCCESS)
}

pub struct RenderArgs<'a> {
    pub window: Option<&'a str>,
    pub layers: Option<&'a str>,
    pub width_px: Option<f64>,
    pub sagitta_px: Option<f64>,
}

fn parse_layers(names: &[String]) -> anyhow::Result<Layers> {
    let mut l = Layers { uplift: false, isometric: false, intervals: false, punctures: false, hexagon: false };
    for n in names {
        match n.trim() {
            "uplift" => l.uplift = true,
            "isometric" => l.isometric = true,
            "intervals" => l.intervals = true,
            "punctures" => l.punctures = true,
            "hexagon" => l.hexagon = true,
            other => return Err(ConfigError(format!("unknown layer {other:?}")).into()),
        }
    }
    Ok(l)
}

pub fn render<S: Scalar>(p: &FrickeParams<S>, cfg: &RunConfig, file: &FileConfig, args: RenderArgs) -> anyhow::Result<ExitCode> {
    if matches!(cfg.format, Some(Format::Csv | Format::Json)) {
        return Err(ConfigError("render writes svg only".into()).into());
    }
    let r = &file.render;
    let window = match args.window {
        Some(w) => {
            let v = w
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ConfigError(format!("bad window {w:?}")))?;
            let [x_min, x_max, y_min, y_max] = v[..] else {
                return Err(ConfigError("window needs x_min,x_max,y_min,y_max".into()).into());
            };
            Some(Window { x_min, x_max, y_min, y_max })
        }
        None => r.window.map(|[x_min, x_max, y_min, y_max]| Window { x_min, x_max, y_min, y_max }),
    };
    let layers = match args.layers {
        Some(s) => parse_layers(&s.split(',').map(str::to_string).collect::<Vec<_>>())?,
        None => match &r.layers {
            Some(v) => parse_layers(v)?,
            None => Layers::default(),
        },
    };
    let defaults = SceneSpec::default();
    let spec = SceneSpec {
        window,
        layers,
        depth: cfg.explicit_depth.unwrap_or(defaults.depth),
        width_px: args.width_px.or(r.width_px).unwrap_or(defaults.width_px),
        sagitta_px: args.sagitta_px.or(r.sagitta_px).unwrap_or(defaults.sagitta_px),
    };
    emit(&cfg.out, &render_svg(p, &spec, cfg.precision)?)?;
    Ok(ExitCode::SUCCESS)
}

pub struct VerifyArgs {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub nodes: Option<usize>,
    pub inject_fault: bool,
}

pub fn verify<S: Scalar>(p: &FrickeParams<S>, cfg: &RunConfig, file: &FileConfig, args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let v = &file.verify;
    let d = VerifyConfig::default();
    let vc = VerifyConfig {
        seed: args.seed.or(v.seed).unwrap_or(d.seed),
        samples: args.samples.or(v.samples).unwrap_or(d.samples),
        nodes: args.nodes.or(v.nodes).unwrap_or(d.nodes),
        crossing_nodes: v.crossing_nodes.unwrap_or(d.crossing_nodes),
        layout_depth: v.layout_depth.unwrap_or(d.layout_depth),
        sum_depth: v.sum_depth.unwrap_or(d.sum_depth),
        branches: v.branches.unwrap_or(d.branches),
        prec: cfg.precision,
        fault: args.inject_fault.then_some(Fault::PerturbMatrix),
    };
    let report = run_suite(p, &vc);
    emit(&cfg.out, &to_json(&report)?)?;
    for g in &report.groups {
        eprintln!(
            "{} {:<22} cases {:>6} failures {:>5}{}",
            if g.passed { "PASS" } else { "FAIL" },
            g.name,
            g.cases,
            g.failures,
            g.worst.as_ref().map(|w| format!(" worst {:.3e}", w.parse::<f64>().unwrap_or(f64::NAN))).unwrap_or_default()
        );
    }
    Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
