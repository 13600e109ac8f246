//! `polyharm`: command-line front end for the polyharmonic library.
//!
//! Exit status is 0 on success, 1 when the library rejects the input or
//! the question cannot be decided, and 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use polyharmonic::harmonic::{almansi_decompose, harmonic_basis, np_formula, np_search};
use polyharmonic::markov::{
    identity_check, markov_eval_numeric, markov_series, rest_series, second_kind,
    second_kind_orthogonality, support_verdict, SeriesRep, SupportVerdict,
};
use polyharmonic::measures::{distributed_moments, orthogonality_order, DiscreteMeasure};
use polyharmonic::rational::format_rational;
use polyharmonic::verify::{density_rank_test, separation_test, RankReport, Separation};
use polyharmonic::{parse_poly, Error, MPoly};

#[derive(Parser)]
#[command(name = "polyharm", version, about = "Exact polyharmonic and Markov-transform computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolyArgs {
    /// Polynomial in x1..xn, e.g. "x1^2 + x2^2 - 1"
    #[arg(long)]
    poly: String,
    /// Dimension n; defaults to the measure's dimension, else the largest variable index (at least 2)
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct Out {
    /// Emit JSON instead of a human-readable report
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Polyharmonic degree d(P)
    Degree {
        #[command(flatten)]
        p: PolyArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Almansi decomposition P = sum |x|^(2j) h_j
    Almansi {
        #[command(flatten)]
        p: PolyArgs,
        #[command(flatten)]
        out: Out,
    },
    /// N_P by the closed form and by search, reporting agreement
    Np {
        #[command(flatten)]
        p: PolyArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Orthogonal basis of the harmonic layer of one degree
    Basis {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Distributed moments c_{t,k,m} for t <= smax/2, k <= smax
    Moments {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 10)]
        smax: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Exact truncated Markov series of a measure
    MarkovSeries {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 10)]
        smax: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Numeric Markov transform at complex zeta and direction theta
    MarkovEval {
        #[arg(long, required_unless_present = "series", conflicts_with = "series")]
        measure: Option<PathBuf>,
        /// Sum a series file written by `markov-series --json` instead
        #[arg(long)]
        series: Option<PathBuf>,
        /// "re" or "re,im"
        #[arg(long, allow_hyphen_values = true, required_unless_present = "grid", conflicts_with = "grid")]
        zeta: Option<String>,
        /// Comma-separated direction, normalized internally
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// CSV sweep over real zeta: "start:end:count"
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Also sum the exact series truncated here
        #[arg(long)]
        smax: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Second-kind function Q_P as polynomials p_{k,m}(zeta^2)
    SecondKind {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        /// Highest sector k [default: deg P + 10]
        #[arg(long)]
        kmax: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Rest coefficients r_s[P]
    Rest {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        /// Truncation order [default: deg P + 10]
        #[arg(long)]
        smax: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Whether the measure lives on P = 0
    Support {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        /// Truncation order [default: deg P + 10]
        #[arg(long)]
        smax: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Coefficientwise check of P(zeta theta) mu_hat = Q_P + R_P
    IdentityCheck {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        /// Truncation order [default: deg P + 10]
        #[arg(long)]
        smax: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Orthogonality of P to all polynomials of degree < order; with --h,
    /// the residue pairing of h against Q_P
    OrthoCheck {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long)]
        h: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Evaluation rank of U_{N_P} at the atoms of a measure
    DensityRank {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long)]
        measure: PathBuf,
        /// Degree bound D [default: 2 * atom count]
        #[arg(long)]
        degree_max: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Search U_{N_P} for a polynomial separating two measures
    Separate {
        #[command(flatten)]
        p: PolyArgs,
        /// Exactly two measure files
        #[arg(long, num_args = 1, required = true)]
        measure: Vec<PathBuf>,
        /// Degree bound [default: 2 * total atom count]
        #[arg(long)]
        degree_max: Option<u32>,
        #[command(flatten)]
        out: Out,
    },
}

/// Failures after argument parsing; all exit with status 1.
#[derive(Debug)]
enum Failure {
    Domain(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn load_measure(path: &Path) -> Res<DiscreteMeasure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(DiscreteMeasure::from_json(&text)?)
}

fn infer_dim(text: &str) -> usize {
    let mut best = 2;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'x' {
            let digits: String = text[i + 1..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(v) = digits.parse::<usize>() {
                best = best.max(v);
            }
        }
    }
    best
}

fn poly(args: &PolyArgs, measure_dim: Option<usize>) -> Res<MPoly> {
    let dim = match (args.dim, measure_dim) {
        (Some(d), Some(m)) if d != m => {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: d,
            }
            .into())
        }
        (Some(d), _) => d,
        (None, Some(m)) => m,
        (None, None) => infer_dim(&args.poly),
    };
    Ok(parse_poly(&args.poly, dim)?)
}

fn q(v: &polyharmonic::Rational) -> String {
    format_rational(v)
}

fn series_table(s: &SeriesRep) -> String {
    let mut out = format!("s_max = {}\n   s   k   m  value\n", s.s_max);
    for (&(si, k, m), v) in &s.coeffs {
        out += &format!("{si:>4}{k:>4}{m:>4}  {}\n", q(v));
    }
    out
}

fn parse_complex(text: &str) -> Res<Complex64> {
    let bad = || Failure::Input(format!("cannot parse zeta {text:?}; expected \"re\" or \"re,im\""));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn parse_floats(text: &str) -> Res<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("cannot parse number {s:?}")))
        })
        .collect()
}

fn parse_grid(g: &str) -> Res<Vec<Complex64>> {
    let bad = || Failure::Input(format!("cannot parse grid {g:?}; expected start:end:count"));
    let parts: Vec<&str> = g.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n < 2 {
        return Err(bad());
    }
    Ok((0..n)
        .map(|i| Complex64::new(a + (b - a) * i as f64 / (n - 1) as f64, 0.0))
        .collect())
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn rank_table(r: &RankReport) -> String {
    let mut out = format!(
        "basis: {}\natoms: {}\nbasis size: {}\nrank: {}\nfull rank: {}\n",
        r.basis_description, r.atom_count, r.basis_size, r.evaluation_matrix_rank, r.full_rank
    );
    if let Some(w) = &r.separating_witness {
        out += &format!("witness: {w}\n");
    }
    out
}

/// Output text for a successful command.
fn run(cli: Cli) -> Res<String> {
    let text = match cli.command {
        Command::Degree { p, out } => {
            let d = poly(&p, None)?.polyharmonic_degree();
            if out.json {
                json!({ "degree": d }).to_string()
            } else {
                d.to_string()
            }
        }
        Command::Almansi { p, out } => {
            let f = poly(&p, None)?;
            let parts = almansi_decompose(&f);
            if out.json {
                let hs: Vec<String> = parts.harmonics.iter().map(ToString::to_string).collect();
                json!({ "dim": f.dim(), "harmonics": hs }).to_string()
            } else {
                parts
                    .harmonics
                    .iter()
                    .enumerate()
                    .map(|(j, h)| format!("h{j} = {h}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        }
        Command::Np { p, out } => {
            let f = poly(&p, None)?;
            let formula = np_formula(&f)?;
            let search = np_search(&f, f.degree())?;
            if formula != search {
                return Err(Error::Consistency(format!(
                    "formula={formula} search={search}"
                ))
                .into());
            }
            if out.json {
                json!({ "np": formula, "formula": formula, "search": search }).to_string()
            } else {
                format!("{formula}\nformula=search={formula}")
            }
        }
        Command::Basis { dim, degree, out } => {
            if dim < 2 {
                return Err(Error::DimensionTooSmall(dim).into());
            }
            let layer = harmonic_basis(dim, degree);
            if out.json {
                serde_json::to_string(&*layer).expect("layer serializes")
            } else {
                let mut s = format!("dim {dim}, degree {degree}, {} elements\n", layer.len());
                for (i, e) in layer.elements.iter().enumerate() {
                    s += &format!("Y_{{{degree},{}}} = {}    norm_sq = {}\n", i + 1, e.poly, q(&e.norm_sq));
                }
                s
            }
        }
        Command::Moments { measure, smax, out } => {
            let mu = load_measure(&measure)?;
            let table = distributed_moments(&mu, smax / 2, smax);
            if out.json {
                table.to_json()
            } else {
                let mut s = String::from("   t   k   m  value\n");
                for (&(t, k, m), v) in &table.entries {
                    s += &format!("{t:>4}{k:>4}{m:>4}  {}\n", q(v));
                }
                s
            }
        }
        Command::MarkovSeries { measure, smax, out } => {
            let s = markov_series(&load_measure(&measure)?, smax);
            if out.json {
                s.to_json()
            } else {
                series_table(&s)
            }
        }
        Command::MarkovEval {
            measure,
            series,
            zeta,
            theta,
            grid,
            smax,
            out,
        } => {
            let theta = parse_floats(&theta)?;
            let mu = measure.as_deref().map(load_measure).transpose()?;
            let series = match (&series, &mu) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    Some(SeriesRep::from_json(&text)?)
                }
                (None, Some(mu)) => smax.map(|s| markov_series(mu, s)),
                (None, None) => None,
            };
            let zetas: Vec<Complex64> = match (&zeta, &grid) {
                (Some(z), _) => vec![parse_complex(z)?],
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => unreachable!("clap requires --zeta or --grid"),
            };
            let mut rows = Vec::new();
            for z in zetas {
                let direct = mu.as_ref().map(|m| markov_eval_numeric(m, z, &theta)).transpose()?;
                let summed = series.as_ref().map(|s| s.eval_numeric(z, &theta)).transpose()?;
                rows.push((z, direct, summed));
            }
            if grid.is_some() {
                let mut header = vec!["zeta_re", "zeta_im"];
                if mu.is_some() {
                    header.extend(["re", "im"]);
                }
                if series.is_some() {
                    header.extend(["series_re", "series_im"]);
                }
                let mut s = header.join(",") + "\n";
                for (z, d, ser) in rows {
                    let mut cells = vec![z.re.to_string(), z.im.to_string()];
                    for v in [d, ser].into_iter().flatten() {
                        cells.extend([v.re.to_string(), v.im.to_string()]);
                    }
                    s += &(cells.join(",") + "\n");
                }
                s
            } else {
                let (_, d, ser) = rows[0];
                if out.json {
                    let mut v = json!({});
                    if let Some(d) = d {
                        v["value"] = complex_json(d);
                    }
                    if let Some(sv) = ser {
                        v["series"] = complex_json(sv);
                    }
                    v.to_string()
                } else {
                    let mut lines = Vec::new();
                    if let Some(d) = d {
                        lines.push(format!("{} {:+}i", d.re, d.im));
                    }
                    if let Some(sv) = ser {
                        lines.push(format!("series: {} {:+}i", sv.re, sv.im));
                    }
                    lines.join("\n")
                }
            }
        }
        Command::SecondKind { p, measure, kmax, out } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            let rep = second_kind(&f, &mu, kmax.unwrap_or(f.degree() + 10))?;
            if out.json {
                rep.to_json()
            } else {
                let mut s = format!("k_max = {}\n   k   m  p(u)\n", rep.k_max);
                for (&(k, m), coeffs) in &rep.sectors {
                    let shown: Vec<String> = coeffs.iter().map(q).collect();
                    s += &format!("{k:>4}{m:>4}  [{}]\n", shown.join(", "));
                }
                s
            }
        }
        Command::Rest { p, measure, smax, out } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            let r = rest_series(&f, &mu, smax.unwrap_or(f.degree() + 10))?;
            if out.json {
                r.to_json()
            } else {
                series_table(&r)
            }
        }
        Command::Support { p, measure, smax, out } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            let verdict = support_verdict(&f, &mu, smax.unwrap_or(f.degree() + 10))?;
            match (out.json, verdict) {
                (false, SupportVerdict::Supported) => "supported".into(),
                (false, SupportVerdict::NotSupported { s, k, m, value }) => {
                    format!("not_supported\ncertificate: r_{s} coefficient (k={k}, m={m}) = {}", q(&value))
                }
                (false, SupportVerdict::Undecided { required }) => {
                    format!("undecided\nrequired smax >= {required}")
                }
                (true, SupportVerdict::Supported) => json!({"verdict": "supported"}).to_string(),
                (true, SupportVerdict::NotSupported { s, k, m, value }) => json!({
                    "verdict": "not_supported",
                    "certificate": {"s": s, "k": k, "m": m, "value": q(&value)}
                })
                .to_string(),
                (true, SupportVerdict::Undecided { required }) => {
                    json!({"verdict": "undecided", "required_smax": required}).to_string()
                }
            }
        }
        Command::IdentityCheck { p, measure, smax, out } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            let ok = identity_check(&f, &mu, smax.unwrap_or(f.degree() + 10))?;
            if out.json {
                json!({ "identity": ok }).to_string()
            } else {
                ok.to_string()
            }
        }
        Command::OrthoCheck {
            p,
            measure,
            order,
            h,
            out,
        } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            match h {
                Some(h) => {
                    let h = parse_poly(&h, mu.dim())?;
                    let v = second_kind_orthogonality(&f, &mu, &h)?;
                    if out.json {
                        json!({ "pairing": q(&v) }).to_string()
                    } else {
                        q(&v)
                    }
                }
                None => {
                    let ok = orthogonality_order(&f, &mu, order)?;
                    if out.json {
                        json!({ "orthogonal": ok, "order": order }).to_string()
                    } else {
                        ok.to_string()
                    }
                }
            }
        }
        Command::DensityRank {
            p,
            measure,
            degree_max,
            out,
        } => {
            let mu = load_measure(&measure)?;
            let f = poly(&p, Some(mu.dim()))?;
            let atoms: Vec<_> = mu.atoms().iter().map(|a| a.point.clone()).collect();
            let d = degree_max.unwrap_or(2 * atoms.len() as u32);
            let r = density_rank_test(&f, &atoms, d)?;
            if out.json {
                r.to_json()
            } else {
                rank_table(&r)
            }
        }
        Command::Separate {
            p,
            measure,
            degree_max,
            out,
        } => {
            let [a, b] = measure.as_slice() else {
                return Err(Failure::Input("separate needs exactly two --measure files".into()));
            };
            let (mu, nu) = (load_measure(a)?, load_measure(b)?);
            let f = poly(&p, Some(mu.dim()))?;
            let d = degree_max.unwrap_or(2 * (mu.atoms().len() + nu.atoms().len()) as u32);
            let result = separation_test(&f, &mu, &nu, d)?;
            match (out.json, result) {
                (false, Separation::Equal) => "equal".into(),
                (true, Separation::Equal) => json!({"result": "equal"}).to_string(),
                (false, Separation::Inconclusive { d_max }) => format!("inconclusive\ndegree_max = {d_max}"),
                (true, Separation::Inconclusive { d_max }) => {
                    json!({"result": "inconclusive", "degree_max": d_max}).to_string()
                }
                (
                    json_out,
                    Separation::Separated {
                        witness,
                        degree,
                        mu_value,
                        nu_value,
                    },
                ) => {
                    if json_out {
                        json!({
                            "result": "separated",
                            "witness": witness.to_string(),
                            "degree": degree,
                            "values": [q(&mu_value), q(&nu_value)]
                        })
                        .to_string()
                    } else {
                        format!(
                            "separated\nwitness: {witness}\ndegree: {degree}\nvalues: {} vs {}",
                            q(&mu_value),
                            q(&nu_value)
                        )
                    }
                }
            }
        }
    };
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            println!("{}", text.trim_end());
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
