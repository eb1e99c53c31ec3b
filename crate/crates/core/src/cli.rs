//! The `shv` command line. Every verb reads and writes `shv/1` JSON documents.
//!
//! Exit codes: 0 success, 1 a comparison answered "no", 2 bad input, 3 a tower did not
//! stabilize, 4 an internal invariant was breached.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{
    classify, open_star, product, subdivide_complex, CellComplex, ConstructibleSet,
};
use crate::enhanced::{
    catalog_build, check_duality, check_etens, check_identity, sheafify, CatalogParams,
    CheckReport, TModel,
};
use crate::error::{Error, Result};
use crate::extension::extend_and_certify;
use crate::germ::{fiber_stalk, germ_limit, hyperbola_tower_generator, pointed_model};
use crate::io::{self, ComplexJson, SetJson, SheafJson, TModelJson, FORMAT};
use crate::linalg::Field;
use crate::sheaf::{
    qis_compare, sections_locally_closed, sections_open, stalk_dims, verdier_dual, Sheaf,
};
use crate::suite::{run_suites, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "shv",
    version,
    about = "Exact computations with cellular constructible sheaves"
)]
pub struct Cli {
    /// Coefficient field: Q or Fp for a prime p.
    #[arg(long, global = true, env = "SHV_FIELD")]
    pub field: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cell complexes and their subsets.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Cellular sheaves.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// Certify an open extension of a locally closed set.
    Extend(ExtendArgs),
    /// Associated sheaf of a t-model.
    Sheafify(SheafifyArgs),
    /// Germ tower at a point of the line.
    Germ(GermArgs),
    /// Randomized property suites.
    Suite(SuiteArgs),
}

/// A subset given inline or as a file.
#[derive(Args, Debug, Clone)]
pub struct SetArg {
    /// Comma separated cell ids.
    #[arg(long, value_delimiter = ',')]
    pub cells: Option<Vec<String>>,
    /// Set document.
    #[arg(long, conflicts_with = "cells")]
    pub set: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ComplexCmd {
    /// Check the grading and diamond conditions.
    Validate { complex: PathBuf },
    /// Barycentric subdivision with its carrier map.
    Subdivide { complex: PathBuf },
    /// Cartesian product.
    Product { first: PathBuf, second: PathBuf },
    /// Open, closed and locally closed flags of a subset.
    Classify {
        complex: PathBuf,
        #[command(flatten)]
        set: SetArg,
    },
    /// Open star of a cell.
    Star {
        complex: PathBuf,
        #[arg(long)]
        cell: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SheafInput {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long)]
    pub sheaf: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum SheafCmd {
    /// Sections over an open set, the whole complex by default.
    Coh {
        #[command(flatten)]
        input: SheafInput,
        #[command(flatten)]
        set: SetArg,
    },
    /// Sections over a locally closed set.
    Sections {
        #[command(flatten)]
        input: SheafInput,
        #[command(flatten)]
        set: SetArg,
    },
    /// Verdier dual, written as a sheaf document.
    Dual {
        #[command(flatten)]
        input: SheafInput,
    },
    /// Compare stalks and open-star sections of two sheaves.
    Compare {
        #[command(flatten)]
        input: SheafInput,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub input: SheafInput,
    #[command(flatten)]
    pub z: SetArg,
    /// Optional open set that must contain the neighbourhood (comma separated ids).
    #[arg(long, value_delimiter = ',')]
    pub w: Option<Vec<String>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Identity,
    Duality,
    Etens,
    None,
}

#[derive(Args, Debug)]
pub struct SheafifyArgs {
    /// Catalog name or path to a t-model document.
    #[arg(long)]
    pub model: String,
    /// Pole order of `blowup-pole`.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Translate the representative by `t ↦ t + a`.
    #[arg(long, allow_hyphen_values = true)]
    pub translate: Option<BigRational>,
    #[arg(long, value_enum, default_value_t = CheckKind::None)]
    pub check: CheckKind,
    /// Also write the t-model document here.
    #[arg(long)]
    pub emit_model: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GermArgs {
    /// Catalog model over the line.
    #[arg(long)]
    pub example: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub point: BigRational,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..))]
    pub stages: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub translate: Option<BigRational>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Add a sheaf whose restrictions do not compose.
    #[arg(long)]
    pub inject_broken: bool,
}

/// A verb's JSON result and exit code.
struct Outcome {
    doc: Value,
    code: i32,
}

impl Outcome {
    fn ok(doc: Value) -> Outcome {
        Outcome { doc, code: 0 }
    }
}

fn doc<T: Serialize>(v: &T) -> Value {
    let mut v = serde_json::to_value(v).expect("results serialize");
    if let Value::Object(m) = &mut v {
        m.insert("format".into(), FORMAT.into());
    }
    v
}

fn read_complex(p: &Path) -> Result<Arc<CellComplex>> {
    io::read::<ComplexJson>(p)?.to_complex()
}

fn read_sheaf(input: &SheafInput, field: Option<Field>) -> Result<Sheaf> {
    let k = read_complex(&input.complex)?;
    io::read::<SheafJson>(&input.sheaf)?.to_sheaf(&k, field)
}

fn read_set(k: &Arc<CellComplex>, s: &SetArg) -> Result<Option<ConstructibleSet>> {
    match (&s.cells, &s.set) {
        (Some(ids), _) => Ok(Some(ConstructibleSet::from_ids(k.clone(), ids)?)),
        (None, Some(p)) => Ok(Some(io::read::<SetJson>(p)?.to_set(k)?)),
        (None, None) => Ok(None),
    }
}

fn require_set(k: &Arc<CellComplex>, s: &SetArg) -> Result<ConstructibleSet> {
    read_set(k, s)?.ok_or_else(|| Error::InvalidParameter("give --cells or --set".into()))
}

fn complex_cmd(c: &ComplexCmd) -> Result<Outcome> {
    Ok(Outcome::ok(match c {
        ComplexCmd::Validate { complex } => {
            let k = read_complex(complex)?;
            json!({
                "format": FORMAT,
                "valid": true,
                "cells": k.len(),
                "dimension": k.dimension(),
                "euler_characteristic": k.euler_characteristic(),
                "simplicial": k.is_simplicial(),
            })
        }
        ComplexCmd::Subdivide { complex } => {
            let k = read_complex(complex)?;
            let (sd, carrier) = subdivide_complex(&k);
            let mut v = doc(&ComplexJson::from_complex(&sd));
            let top = sd.cells_of_dim(sd.dimension()).len();
            let carrier: BTreeMap<&str, &str> = (0..sd.len())
                .map(|i| (sd.id(i), k.id(carrier.apply(i))))
                .collect();
            v["top_cells"] = json!(top);
            v["carrier"] = json!(carrier);
            v
        }
        ComplexCmd::Product { first, second } => {
            let p = product(&read_complex(first)?, &read_complex(second)?);
            doc(&ComplexJson::from_complex(&p.complex))
        }
        ComplexCmd::Classify { complex, set } => {
            let k = read_complex(complex)?;
            doc(&classify(&require_set(&k, set)?))
        }
        ComplexCmd::Star { complex, cell } => {
            let k = read_complex(complex)?;
            doc(&SetJson::from_set(&open_star(&k, k.index_of(cell)?)))
        }
    }))
}

fn sheaf_cmd(c: &SheafCmd, field: Option<Field>) -> Result<Outcome> {
    match c {
        SheafCmd::Coh { input, set } => {
            let f = read_sheaf(input, field)?;
            let u = read_set(f.complex(), set)?
                .unwrap_or_else(|| ConstructibleSet::all(f.complex().clone()));
            let h = sections_open(&u, &f)?.cohomology();
            Ok(Outcome::ok(json!({"format": FORMAT, "cohomology": h})))
        }
        SheafCmd::Sections { input, set } => {
            let f = read_sheaf(input, field)?;
            let z = require_set(f.complex(), set)?;
            let h = sections_locally_closed(&z, &f)?.cohomology();
            Ok(Outcome::ok(json!({"format": FORMAT, "cohomology": h})))
        }
        SheafCmd::Dual { input } => {
            let f = read_sheaf(input, field)?;
            Ok(Outcome::ok(doc(&SheafJson::from_sheaf(&verdier_dual(&f)))))
        }
        SheafCmd::Compare { input, other } => {
            let f = read_sheaf(input, field)?;
            let g = io::read::<SheafJson>(other)?.to_sheaf(f.complex(), field)?;
            let r = qis_compare(&f, &g)?;
            let code = if r.pass { 0 } else { 1 };
            Ok(Outcome { doc: doc(&r), code })
        }
    }
}

fn extend_cmd(a: &ExtendArgs, field: Option<Field>) -> Result<Outcome> {
    let f = read_sheaf(&a.input, field)?;
    let z = require_set(f.complex(), &a.z)?;
    let w = match &a.w {
        Some(ids) => Some(ConstructibleSet::from_ids(f.complex().clone(), ids)?),
        None => None,
    };
    let cert = extend_and_certify(&f, &z, w.as_ref())?;
    let code = if cert.valid { 0 } else { 4 };
    Ok(Outcome {
        doc: doc(&cert),
        code,
    })
}

#[derive(Serialize)]
struct StalkRow {
    cell: String,
    dims: crate::linalg::GradedDims,
}

fn load_model(a: &SheafifyArgs, field: Field) -> Result<TModel> {
    let path = Path::new(&a.model);
    if a.model.ends_with(".json") || path.exists() {
        return io::read::<TModelJson>(path)?.to_model(Some(field));
    }
    catalog_build(
        &a.model,
        &CatalogParams {
            field,
            d: a.d,
            translate: a.translate.clone(),
        },
    )
}

fn sheafify_cmd(a: &SheafifyArgs, field: Field) -> Result<Outcome> {
    let m = load_model(a, field)?;
    if let Some(p) = &a.emit_model {
        write_text(p, &io::to_string(&TModelJson::from_model(&m)))?;
    }
    let s = sheafify(&m)?;
    let rows: Vec<StalkRow> = stalk_dims(&s)
        .into_iter()
        .enumerate()
        .map(|(i, dims)| StalkRow {
            cell: m.base.id(i).to_string(),
            dims,
        })
        .collect();
    let check: Option<CheckReport> = match a.check {
        CheckKind::Identity => Some(check_identity(&m)?),
        CheckKind::Duality => Some(check_duality(&m)?),
        CheckKind::Etens => Some(check_etens(&m)?),
        CheckKind::None => None,
    };
    let code = match &check {
        Some(c) if !c.pass => 4,
        _ => 0,
    };
    let mut v =
        json!({"format": FORMAT, "model": m.name, "field": field.to_string(), "stalks": rows});
    if let Some(c) = check {
        v["check"] = json!(c);
    }
    Ok(Outcome { doc: v, code })
}

fn germ_cmd(a: &GermArgs, field: Field) -> Result<Outcome> {
    let params = CatalogParams {
        field,
        d: 2,
        translate: a.translate.clone(),
    };
    let tower = hyperbola_tower_generator(&a.example, &params, &a.point, a.stages as usize)?;
    let report = germ_limit(&tower)?;
    let (pm, pt) = pointed_model(&a.example, &params, &a.point)?;
    let stalk = fiber_stalk(&pm, pt)?;
    let consistent = report.limit.as_ref() == Some(&stalk);
    let code = if !report.stabilized {
        Error::NotStabilized.exit_code()
    } else if !consistent {
        4
    } else {
        0
    };
    let mut v = doc(&report);
    v["fiber_stalk"] = json!(stalk);
    v["consistent"] = json!(consistent);
    Ok(Outcome { doc: v, code })
}

fn suite_cmd(a: &SuiteArgs, field: Option<Field>) -> Result<Outcome> {
    let r = run_suites(&SuiteConfig {
        seed: a.seed,
        count: a.count,
        field,
        inject_broken_fixture: a.inject_broken,
    });
    let code = if r.pass { 0 } else { 4 };
    Ok(Outcome { doc: doc(&r), code })
}

fn write_text(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, format!("{s}\n")).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = (|| {
        let field = cli.field.as_deref().map(Field::parse).transpose()?;
        let out = match &cli.command {
            Command::Complex(c) => complex_cmd(c)?,
            Command::Sheaf(c) => sheaf_cmd(c, field)?,
            Command::Extend(a) => extend_cmd(a, field)?,
            Command::Sheafify(a) => sheafify_cmd(a, field.unwrap_or(Field::Rationals))?,
            Command::Germ(a) => germ_cmd(a, field.unwrap_or(Field::Rationals))?,
            Command::Suite(a) => suite_cmd(a, field)?,
        };
        let text = serde_json::to_string_pretty(&out.doc).expect("values serialize");
        match &cli.output {
            Some(p) => write_text(p, &text)?,
            None => {
                use std::io::Write;
                // a closed pipe downstream is not an error of ours
                let _ = writeln!(std::io::stdout(), "{text}");
            }
        }
        Ok::<i32, Error>(out.code)
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            let v = json!({"format": FORMAT, "error": e.to_string(), "exit_code": e.exit_code()});
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&v).expect("values serialize")
            );
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    execute(&Cli::parse())
}
