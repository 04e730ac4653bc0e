use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use sigma_nabla_core::frobenius::{average_projector, block_companion, frob_iterate, is_unit_root, newton_slopes_frob, purity_check, Purity};
use sigma_nabla_core::lfunction::{
    check_compatible, check_pure_system, lfunction_truncated, pole_order_at, trace_formula_check, Compatibility, TraceVerdict,
};
use sigma_nabla_core::module::{
    descend_to_eplus, glue_dieudonne, horizontal_basis_module, matfact_gamma, matfact_robba, quasi_nilpotence_probe,
    CompatVerdict, ProbeOutcome,
};
use sigma_nabla_core::{Error, Matrix, PadicNumber, SeriesMatrix, SigmaNablaModule};

use crate::config::JobConfig;
use crate::format::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FactorKind {
    Gamma,
    Robba,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Check the compatibility identities of a module.
    CheckModule { module: PathBuf },
    /// Factor a matrix as Y Z over the Cohen ring or the Robba ring.
    Factor {
        #[arg(value_enum)]
        kind: FactorKind,
        matrix: PathBuf,
    },
    /// Check that Y Z reproduces X.
    CheckProduct { y: PathBuf, z: PathBuf, x: PathBuf },
    /// Descend a module to the bounded plus ring along X.
    Descend { module: PathBuf, x: PathBuf },
    /// Glue a Dieudonne module over Gamma with its image under X.
    Glue {
        module: PathBuf,
        x: PathBuf,
        /// Module over the bounded plus ring that X must produce.
        #[arg(long)]
        second: Option<PathBuf>,
    },
    /// Horizontal sections in nonnegative degrees.
    Horizontal { module: PathBuf },
    /// Newton slopes of a constant Frobenius matrix.
    Slopes { matrix: PathBuf },
    /// Probe the connection for quasi-nilpotence.
    ProbeNilpotence {
        module: PathBuf,
        /// Valuation the iterates must reach.
        #[arg(long, default_value_t = 1)]
        target: i64,
    },
    /// Average a projector over the Frobenius orbit.
    AverageProjector { input: PathBuf },
    /// Block companion matrix and its iterate.
    Companion { input: PathBuf },
    /// Truncated L-function at one place.
    Lfunction {
        table: PathBuf,
        #[arg(long)]
        place: String,
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Compare the Euler product with the cohomological side.
    TraceCheck {
        table: PathBuf,
        cohomology: PathBuf,
        #[arg(long)]
        place: String,
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Compare local factors across places.
    Compat { table: PathBuf },
    /// Purity of a single local factor or of a whole table.
    Purity {
        input: PathBuf,
        #[arg(long)]
        weight: Option<i64>,
    },
    /// Order of the root t = q^{-d}.
    PoleOrder { input: PathBuf },
}

/// Outcome of a command: exit status, report and files to write.
#[derive(Clone, Debug)]
pub struct Report {
    pub status: i32,
    pub body: Value,
    pub files: Vec<(PathBuf, String)>,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { status: 0, body, files: vec![] }
    }

    fn verdict(pass: bool, body: Value) -> Self {
        Report { status: if pass { 0 } else { 1 }, body, files: vec![] }
    }

    fn error(e: &Error) -> Self {
        let status = if e.is_mathematical() { 1 } else { 2 };
        Report { status, body: json!({ "verdict": "Error", "error": e.name(), "message": e.to_string() }), files: vec![] }
    }

    pub fn render(&self) -> String {
        emit_doc(&self.body)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    parse_doc(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

fn load_module(path: &Path, cfg: &JobConfig) -> Result<SigmaNablaModule, Error> {
    let doc: ModuleDoc = load(path)?;
    let p = prime_of(&doc.p)?;
    cfg.check_prime(p)?;
    let m = module_from_doc(&doc, cfg.prec_for(p)?, cfg.window)?;
    cfg.check_q(p, m.q)?;
    Ok(m)
}

struct MatrixInput {
    p: u64,
    matrix: SeriesMatrix,
    diagonal: Option<Vec<(PadicNumber, i64)>>,
}

fn load_series_matrix(path: &Path, cfg: &JobConfig) -> Result<MatrixInput, Error> {
    let doc: SeriesMatrixFile = load(path)?;
    check_version(doc.format_version)?;
    let p = prime_of(&doc.p)?;
    cfg.check_prime(p)?;
    let prec = cfg.prec_for(p)?;
    let matrix = series_matrix_from_doc(&doc.matrix, p, prec, cfg.window, "matrix")?;
    let diagonal = doc
        .diagonal
        .as_ref()
        .map(|d| d.iter().map(|(c, e)| Ok((scalar_from_doc(c, p, prec)?, *e))).collect::<Result<Vec<_>, Error>>())
        .transpose()?;
    Ok(MatrixInput { p, matrix, diagonal })
}

fn matrix_file(p: u64, m: &SeriesMatrix) -> String {
    emit_doc(&SeriesMatrixFile { format_version: FORMAT_VERSION, p: p.into(), matrix: series_matrix_to_doc(m), diagonal: None })
}

fn verdict_json(v: &CompatVerdict) -> Value {
    match v {
        CompatVerdict::Holds { floor } => json!({ "verdict": "Holds", "precision_floor": floor }),
        CompatVerdict::Fails { row, col, exponent, valuation } => {
            json!({ "verdict": "Fails", "row": row, "col": col, "exponent": exponent, "valuation": valuation })
        }
    }
}

fn profile_json(p: &[Option<i64>]) -> Value {
    json!(p)
}

fn purity_json(p: &Purity) -> Value {
    match p {
        Purity::Pure { magnitudes } => json!({ "verdict": "Pure", "magnitudes": magnitudes }),
        Purity::Impure { witness, magnitudes } => json!({ "verdict": "Impure", "witness": witness, "magnitudes": magnitudes }),
    }
}

/// Runs one command; never panics on bad input.
pub fn run(cmd: &Command, cfg: &JobConfig) -> Report {
    match cfg.validate().and_then(|_| dispatch(cmd, cfg)) {
        Ok(r) => r,
        Err(e) => Report::error(&e),
    }
}

fn dispatch(cmd: &Command, cfg: &JobConfig) -> Result<Report, Error> {
    match cmd {
        Command::CheckModule { module } => {
            let m = load_module(module, cfg)?;
            let compat = m.check_compat()?;
            let mut pass = compat.holds();
            let mut body = json!({ "command": "check-module", "rank": m.rank(), "ring": m.ring.to_string(), "compat": verdict_json(&compat) });
            if m.b.is_some() {
                let v = m.check_v_compat()?;
                let fv = m.check_fv()?;
                pass &= v.holds() && fv.holds();
                body["v_compat"] = verdict_json(&v);
                body["fv"] = verdict_json(&fv);
            }
            body["verdict"] = json!(if pass { "Holds" } else { "Fails" });
            Ok(Report::verdict(pass, body))
        }
        Command::Factor { kind, matrix } => {
            let input = load_series_matrix(matrix, cfg)?;
            let p = input.p;
            let (y, z, mut body) = match kind {
                FactorKind::Gamma => {
                    let f = matfact_gamma(&input.matrix)?;
                    let z = SeriesMatrix::from_scalars(&f.z);
                    let body = json!({ "command": "factor", "kind": "gamma", "exponents": f.exponents, "z": scalar_matrix_to_doc(&f.z) });
                    (f.y, z, body)
                }
                FactorKind::Robba => {
                    let f = matfact_robba(&input.matrix, input.diagonal.as_deref())?;
                    let body = json!({ "command": "factor", "kind": "robba", "iterations": f.iterations });
                    (f.y, f.z, body)
                }
            };
            body["verdict"] = json!("Factored");
            body["y"] = json!(series_matrix_to_doc(&y));
            let mut r = Report::ok(body);
            if let Some(dir) = &cfg.out {
                r.files.push((dir.join("y.json"), matrix_file(p, &y)));
                r.files.push((dir.join("z.json"), matrix_file(p, &z)));
            }
            Ok(r)
        }
        Command::CheckProduct { y, z, x } => {
            let (y, z, x) = (load_series_matrix(y, cfg)?, load_series_matrix(z, cfg)?, load_series_matrix(x, cfg)?);
            if y.p != z.p || y.p != x.p {
                return Err(Error::PrimeMismatch(y.p, if y.p != z.p { z.p } else { x.p }));
            }
            let prod = y.matrix.mul(&z.matrix)?;
            if prod.rows() != x.matrix.rows() {
                return Err(Error::DimensionMismatch("Y Z and X have different sizes".into()));
            }
            let diff = prod.first_difference(&x.matrix)?;
            let floor = prod.agreement_floor(&x.matrix)?;
            let body = match &diff {
                None => json!({ "command": "check-product", "verdict": "Reproduces", "precision_floor": floor }),
                Some(d) => json!({
                    "command": "check-product", "verdict": "Differs", "row": d.row, "col": d.col,
                    "first_nonzero": d.residual.first_nonzero, "min_valuation": d.residual.min_valuation,
                }),
            };
            Ok(Report::verdict(diff.is_none(), body))
        }
        Command::Descend { module, x } => {
            let m = load_module(module, cfg)?;
            let x = load_series_matrix(x, cfg)?;
            let d = descend_to_eplus(&m, &x.matrix, x.diagonal.as_deref())?;
            let pass = d.compat.holds();
            let body = json!({
                "command": "descend", "verdict": if pass { "Holds" } else { "Fails" },
                "iterations": d.factorization.iterations, "compat": verdict_json(&d.compat),
                "module": module_to_doc(&d.module),
            });
            let mut r = Report::verdict(pass, body);
            if let Some(out) = &cfg.out {
                r.files.push((out.clone(), emit_doc(&module_to_doc(&d.module))));
            }
            Ok(r)
        }
        Command::Glue { module, x, second } => {
            let m1 = load_module(module, cfg)?;
            let m2 = second.as_ref().map(|s| load_module(s, cfg)).transpose()?;
            let x = load_series_matrix(x, cfg)?;
            let g = glue_dieudonne(&m1, m2.as_ref(), &x.matrix)?;
            let pass = g.compat.holds() && g.fv.holds();
            let body = json!({
                "command": "glue", "verdict": if pass { "Holds" } else { "Fails" },
                "exponents": g.factorization.exponents, "compat": verdict_json(&g.compat), "fv": verdict_json(&g.fv),
                "module": module_to_doc(&g.module),
            });
            let mut r = Report::verdict(pass, body);
            if let Some(out) = &cfg.out {
                r.files.push((out.clone(), emit_doc(&module_to_doc(&g.module))));
            }
            Ok(r)
        }
        Command::Horizontal { module } => {
            let m = load_module(module, cfg)?;
            match horizontal_basis_module(&m, cfg.kmax) {
                Ok(h) => Ok(Report::ok(json!({
                    "command": "horizontal", "verdict": "Solved", "achieved_degree": h.achieved_degree,
                    "precision": h.precision, "residual_floor": h.residual_floor, "h": series_matrix_to_doc(&h.h),
                }))),
                Err(Error::HorizontalExhausted { achieved_degree, partial }) => Ok(Report::verdict(false, json!({
                    "command": "horizontal", "verdict": "Error", "error": "PrecisionExhausted",
                    "achieved_degree": achieved_degree, "precision": partial.precision,
                    "residual_floor": partial.residual_floor, "h": series_matrix_to_doc(&partial.h),
                }))),
                Err(e) => Err(e),
            }
        }
        Command::Slopes { matrix } => {
            let doc: ScalarMatrixFile = load(matrix)?;
            check_version(doc.format_version)?;
            let p = prime_of(&doc.p)?;
            cfg.check_prime(p)?;
            let f = scalar_matrix_from_doc(&doc.matrix, p, cfg.prec_for(p)?, "Frobenius")?;
            let np = newton_slopes_frob(&f)?;
            let slopes: Vec<Value> = np.slopes.iter().map(|(s, m)| json!([s.to_string(), m])).collect();
            Ok(Report::ok(json!({
                "command": "slopes", "verdict": "Computed", "slopes": slopes, "zero_roots": np.zero_roots,
                "unit_root": is_unit_root(&f)?,
            })))
        }
        Command::ProbeNilpotence { module, target } => {
            let m = load_module(module, cfg)?;
            let (name, pass, step, profile) = match quasi_nilpotence_probe(&m, cfg.nmax, *target)? {
                ProbeOutcome::Plausible(p) => ("Plausible", true, None, p),
                ProbeOutcome::Inconclusive(p) => ("Inconclusive", true, None, p),
                ProbeOutcome::Refuted(s, p) => ("Refuted", false, Some(s), p),
            };
            Ok(Report::verdict(pass, json!({
                "command": "probe-nilpotence", "verdict": name, "step": step, "profile": profile_json(&profile),
            })))
        }
        Command::AverageProjector { input } => {
            let doc: ProjectorDoc = load(input)?;
            check_version(doc.format_version)?;
            let pi = rational_matrix_from_doc(&doc.pi, "pi")?;
            let f = rational_matrix_from_doc(&doc.frobenius, "frobenius")?;
            let n: usize = doc.n.small("n")?;
            let avg = average_projector(&pi, &f, n)?;
            let out = rational_matrix_to_doc(&avg);
            let mut r = Report::ok(json!({ "command": "average-projector", "verdict": "Averaged", "projector": out }));
            if let Some(path) = &cfg.out {
                r.files.push((path.clone(), emit_doc(&json!({ "format_version": FORMAT_VERSION, "matrix": out }))));
            }
            Ok(r)
        }
        Command::Companion { input } => {
            let doc: CompanionDoc = load(input)?;
            check_version(doc.format_version)?;
            let fg = rational_matrix_from_doc(&doc.block, "block")?;
            let n: usize = doc.n.small("n")?;
            let c = block_companion(&fg, n)?;
            let it = frob_iterate(&c, n as i64)?;
            let r = fg.rows();
            let want = Matrix::from_fn(n * r, n * r, |i, j| {
                if i / r == j / r { fg.get(i % r, j % r).clone() } else { num_rational::BigRational::from_integer(BigInt::from(0)) }
            });
            let pass = it == want;
            let out = rational_matrix_to_doc(&c);
            let mut rep = Report::verdict(pass, json!({
                "command": "companion", "verdict": if pass { "BlockDiagonal" } else { "NotBlockDiagonal" },
                "companion": out, "iterate": rational_matrix_to_doc(&it),
            }));
            if let Some(path) = &cfg.out {
                rep.files.push((path.clone(), emit_doc(&json!({ "format_version": FORMAT_VERSION, "matrix": out }))));
            }
            Ok(rep)
        }
        Command::Lfunction { table, place, degree } => {
            let t = table_from_doc(&load(table)?)?;
            let l = lfunction_truncated(&t, place, *degree)?;
            let coeffs: Vec<String> = l.coeffs.iter().map(|c| c.to_string()).collect();
            Ok(Report::ok(json!({ "command": "lfunction", "verdict": "Computed", "place": place, "degree": degree, "coeffs": coeffs })))
        }
        Command::TraceCheck { table, cohomology, place, degree } => {
            let t = table_from_doc(&load(table)?)?;
            let c: CohomologyDoc = load(cohomology)?;
            check_version(c.format_version)?;
            let coh = [poly_from_doc(&c.p0), poly_from_doc(&c.p1), poly_from_doc(&c.p2)];
            let v = trace_formula_check(&t, place, &coh, *degree)?;
            let body = match &v {
                TraceVerdict::Consistent { degree } => json!({ "command": "trace-check", "verdict": "Consistent", "degree": degree }),
                TraceVerdict::Inconsistent { degree } => json!({ "command": "trace-check", "verdict": "Inconsistent", "degree": degree }),
            };
            Ok(Report::verdict(v.is_consistent(), body))
        }
        Command::Compat { table } => {
            let t = table_from_doc(&load(table)?)?;
            Ok(match check_compatible(&t) {
                Compatibility::Compatible => Report::ok(json!({ "command": "compat", "verdict": "Compatible" })),
                Compatibility::Mismatch { point, place1, place2 } => Report::verdict(false, json!({
                    "command": "compat", "verdict": "Mismatch", "point": point, "places": [place1, place2],
                })),
            })
        }
        Command::Purity { input, weight } => {
            let text = read(input)?;
            let value: Value = parse_doc(&text)?;
            if value.get("places").is_some() {
                let t = table_from_doc(&parse_doc(&text)?)?;
                let w = weight.ok_or_else(|| Error::InvalidInput("--weight is required for a table".into()))?;
                let report = check_pure_system(&t, w, cfg.tol)?;
                let pass = report.iter().all(|(_, _, p)| p.is_pure());
                let entries: Vec<Value> = report
                    .iter()
                    .map(|(place, point, p)| {
                        let mut v = purity_json(p);
                        v["place"] = json!(place);
                        v["point"] = json!(point);
                        v
                    })
                    .collect();
                Ok(Report::verdict(pass, json!({ "command": "purity", "verdict": if pass { "Pure" } else { "Impure" }, "entries": entries })))
            } else {
                let doc: PolyDoc = parse_doc(&text)?;
                check_version(doc.format_version)?;
                let q: u64 = doc.q.small("q")?;
                let deg: u32 = doc.deg.as_ref().map(|d| d.small("deg")).transpose()?.unwrap_or(1);
                let w = match (weight, &doc.weight) {
                    (Some(w), _) => *w,
                    (None, Some(w)) => w.small("weight")?,
                    (None, None) => return Err(Error::InvalidInput("no weight given".into())),
                };
                let p = purity_check(&poly_from_doc(&doc.poly), q, deg, w, cfg.tol)?;
                let mut body = purity_json(&p);
                body["command"] = json!("purity");
                Ok(Report::verdict(p.is_pure(), body))
            }
        }
        Command::PoleOrder { input } => {
            let doc: PolyDoc = load(input)?;
            check_version(doc.format_version)?;
            let q: u64 = doc.q.small("q")?;
            let d: u32 = doc.deg.as_ref().ok_or_else(|| Error::InvalidInput("field deg is required".into()))?.small("deg")?;
            let order = pole_order_at(&poly_from_doc(&doc.poly), q, d);
            Ok(Report::ok(json!({ "command": "pole-order", "verdict": "Computed", "order": order })))
        }
    }
}
