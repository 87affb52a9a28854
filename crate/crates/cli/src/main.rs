use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nmds_core::code_analysis::{
    closed_forms, disjoint_support_pairing, min_weight_count_formula, min_weight_supports,
    nmds_weight_distribution, supports_by_weight_bruteforce, weight_distribution_bruteforce,
    WeightDistribution,
};
use nmds_core::code_builder::{dual_code, nmds_structural_check, CodeClass};
use nmds_core::finite_field::parse_modulus;
use nmds_core::group_designs::{
    brute_force_counts, count_subsets_full, count_subsets_nonzero, verify_design, AbelianGroup,
    DesignCheckReport, DesignInstance,
};
use nmds_core::param_search::{
    build_pipeline, build_table_row, check_k, curve_equation, find_curve, search_parameters,
    CatalogRecord, CurveCertificate, Pipeline, PipelineOptions, CURVE_TABLE,
};
use nmds_core::{Budget, Error, Result};

#[derive(Parser)]
#[command(name = "nmds", version, about = "NMDS elliptic-curve codes and the 2-designs they support")]
struct Cli {
    /// Emit JSON (JSON lines for tables).
    #[arg(long, global = true)]
    json: bool,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct CodeArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u64,
    /// Use y^2 = x^3 + b instead of the first curve found.
    #[arg(long)]
    b: Option<i64>,
    /// Modulus of F_{q^2}: `x^2+11` or coefficients with the constant term first (`11,0,1`).
    #[arg(long = "ext-poly")]
    ext_poly: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Formula,
}

#[derive(Subcommand)]
enum Command {
    /// (q, p, t) triples admitting a curve with group Z_p + Z_p.
    SearchParams {
        #[arg(long = "p-max")]
        p_max: u64,
        /// Also keep t <= 0.
        #[arg(long)]
        any_t: bool,
    },
    /// First curve over F_q with group Z_p + Z_p.
    FindCurve {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
    },
    /// Build the code and print its generator matrix.
    Build(CodeArgs),
    /// Weight distribution of the code (or its dual).
    Weights {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long)]
        dual: bool,
    },
    /// Enumerate minimum-weight supports and check the t-design property.
    VerifyDesign {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Check the complementary design of the dual code instead.
        #[arg(long)]
        dual: bool,
    },
    /// Column conditions of an NMDS generator matrix and the support pairing.
    VerifyNmds(CodeArgs),
    /// Number of k-subsets of a finite abelian group with a given sum.
    SubsetCount {
        /// Invariant factors, e.g. 3x3.
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: u64,
        /// Target element, e.g. 1,0.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Only subsets avoiding 0.
        #[arg(long)]
        nonzero: bool,
        /// Cross-check against literal enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Catalog of the published curve table (k = p).
    Table3 {
        /// Skip rows with larger q.
        #[arg(long = "max-q")]
        max_q: Option<u64>,
    },
    /// Triples with t >= 1 and the code lengths they give.
    Table4 {
        #[arg(long = "p-max", default_value_t = 2000)]
        p_max: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let budget = Budget::from_env();
    match run(&cli, &budget) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string(value).expect("serializable"));
    } else {
        println!("{}", human());
    }
}

fn pipeline(args: &CodeArgs, budget: &Budget) -> Result<Pipeline> {
    let opts = PipelineOptions {
        curve_b: args.b,
        ext_modulus: args
            .ext_poly
            .as_deref()
            .map(|s| parse_modulus(s, characteristic(args.q)?))
            .transpose()?,
    };
    build_pipeline(args.q, args.p, args.k, &opts, budget)
}

fn characteristic(q: u64) -> Result<u64> {
    nmds_core::arith::prime_power(q)
        .map(|(r, _)| r)
        .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))
}

fn run(cli: &Cli, budget: &Budget) -> Result<()> {
    let json = cli.json;
    match &cli.command {
        Command::SearchParams { p_max, any_t } => {
            let rows = search_parameters(*p_max, !any_t);
            if json {
                for r in &rows {
                    emit(true, r, String::new);
                }
            } else {
                println!("{:>10} {:>6} {:>6}", "q", "p", "t");
                for r in &rows {
                    println!("{:>10} {:>6} {:>6}", r.q, r.p, r.t);
                }
                println!("{} triples", rows.len());
            }
        }
        Command::FindCurve { q, p } => {
            let (c, cert) = find_curve(*q, *p, budget)?;
            #[derive(Serialize)]
            struct Out {
                curve: String,
                encoded: String,
                certificate: CurveCertificate,
            }
            let out = Out {
                curve: curve_equation(&c),
                encoded: c.encode(),
                certificate: cert,
            };
            emit(json, &out, || {
                format!(
                    "{} over F_{}: {} points, group Z_{} + Z_{}, [{}]P = O for all P: {}",
                    out.curve,
                    q,
                    out.certificate.points,
                    out.certificate.group.n1,
                    out.certificate.group.n2,
                    p,
                    out.certificate.torsion_verified
                )
            });
        }
        Command::Build(args) => cmd_build(args, json, budget)?,
        Command::Weights { code, method, dual } => cmd_weights(code, *method, *dual, json, budget)?,
        Command::VerifyDesign { code, t, dual } => cmd_verify_design(code, *t, *dual, json, budget)?,
        Command::VerifyNmds(args) => cmd_verify_nmds(args, json, budget)?,
        Command::SubsetCount {
            group,
            k,
            x,
            nonzero,
            oracle,
        } => cmd_subset_count(group, *k, x, *nonzero, *oracle, json, budget)?,
        Command::Table3 { max_q } => {
            let mut records: Vec<CatalogRecord> = Vec::new();
            for &(q, p) in CURVE_TABLE.iter().filter(|(q, _)| max_q.is_none_or(|m| *q <= m)) {
                let r = build_table_row(q, p, p, &PipelineOptions::default(), budget)?;
                if json {
                    emit(true, &r, String::new);
                }
                records.push(r);
            }
            if !json {
                println!(
                    "{:>6} {:<18} {:<7} {:<10} {:>5} {:>16} {:>4} {:>16}",
                    "q", "curve", "group", "ext", "xQ", "code", "NMDS", "2-design lambda"
                );
                for r in &records {
                    println!(
                        "{:>6} {:<18} {:<7} {:<10} {:>5} {:>16} {:>4} {:>16}",
                        r.q,
                        r.curve,
                        r.group,
                        r.ext_modulus,
                        r.x_q,
                        format!("[{},{},{}]", r.n, r.dim, r.dmin),
                        if r.nmds { "yes" } else { "no" },
                        format!("{} ({})", short_number(&r.design.lambda.to_string()), mode_name(&r.design.mode))
                    );
                }
            }
        }
        Command::Table4 { p_max } => {
            let rows = search_parameters(*p_max, true);
            #[derive(Serialize)]
            struct Row {
                q: u64,
                p: u64,
                t: i64,
                n: u64,
                code: String,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    q: r.q,
                    p: r.p,
                    t: r.t,
                    n: r.p * r.p,
                    code: format!("[{n},2k,{n}-2k] ({p} | k)", n = r.p * r.p, p = r.p),
                })
                .collect();
            if json {
                for r in &rows {
                    emit(true, r, String::new);
                }
            } else {
                println!("{:>10} {:>6} {:>6}  code", "q", "p", "t");
                for r in &rows {
                    println!("{:>10} {:>6} {:>6}  {}", r.q, r.p, r.t, r.code);
                }
                println!("{} triples", rows.len());
            }
        }
    }
    Ok(())
}

/// Long integers as `d.ddde<exp>`.
fn short_number(s: &str) -> String {
    if s.len() <= 12 {
        return s.to_string();
    }
    format!("{}.{}e{}", &s[..1], &s[1..4], s.len() - 1)
}

fn mode_name(m: &nmds_core::code_analysis::DesignMode) -> &'static str {
    match m {
        nmds_core::code_analysis::DesignMode::Measured => "measured",
        nmds_core::code_analysis::DesignMode::TheoryImplied => "theory",
    }
}

fn cmd_build(args: &CodeArgs, json: bool, budget: &Budget) -> Result<()> {
    let pl = pipeline(args, budget)?;
    #[derive(Serialize)]
    struct Out {
        q: u64,
        p: u64,
        k: u64,
        curve: String,
        group: String,
        ext_modulus: String,
        #[serde(rename = "xQ")]
        x_q: String,
        #[serde(rename = "Q")]
        point: String,
        n: usize,
        dim: usize,
        dmin: usize,
        class: CodeClass,
        zero_sum_subsets: String,
        generator: Vec<Vec<String>>,
    }
    let out = Out {
        q: pl.q,
        p: pl.p,
        k: pl.k as u64,
        curve: curve_equation(&pl.curve),
        group: pl.certificate.group.to_string(),
        ext_modulus: pl.extension.ext.modulus_string(),
        x_q: pl.trace_zero.x_base.to_string(),
        point: format_point(&pl.trace_zero.point),
        n: pl.code.len(),
        dim: pl.code.dim(),
        dmin: pl.min_distance()?,
        class: pl.classification.class,
        zero_sum_subsets: pl.classification.zero_sum_subsets.to_string(),
        generator: pl.code.matrix_strings(),
    };
    emit(json, &out, || {
        format!(
            "curve      {} over F_{}\ngroup      {}\nextension  {} (root a)\nQ          {}\ncode       [{},{},{}] {}\nzero-sum {}-subsets: {}\ngenerator matrix:\n{}",
            out.curve,
            out.q,
            out.group,
            out.ext_modulus,
            out.point,
            out.n,
            out.dim,
            out.dmin,
            out.class,
            out.dim,
            out.zero_sum_subsets,
            pl.code.matrix_grid()
        )
    });
    Ok(())
}

fn cmd_weights(args: &CodeArgs, method: Method, dual: bool, json: bool, budget: &Budget) -> Result<()> {
    check_k(args.p, args.k)?;
    let n = (args.p * args.p) as usize;
    let dim = 2 * args.k as usize;
    let a_min = min_weight_count_formula(args.p, args.q, args.k)?;
    let brute = match method {
        Method::Brute => true,
        Method::Formula => false,
        Method::Auto => (args.q as f64).powi(dim as i32) <= 1e7,
    };
    let pl = pipeline(args, budget)?;
    // A_min again, from the subset-sum count behind the classification
    let from_subsets = &pl.classification.zero_sum_subsets * (args.q - 1);
    if from_subsets != a_min {
        return Err(Error::CertificationMismatch(format!(
            "minimum-weight count {a_min} from the closed form, {from_subsets} from subset sums"
        )));
    }
    let (primal, dual_dist) = nmds_weight_distribution(n, dim, args.q, &a_min)?;
    let dist: WeightDistribution = if brute {
        let code = if dual { dual_code(&pl.code) } else { pl.code.clone() };
        let measured = weight_distribution_bruteforce(&code, budget)?;
        let expected = if dual { &dual_dist } else { &primal };
        if &measured != expected {
            return Err(Error::CertificationMismatch(format!(
                "enumerated distribution {measured} differs from the closed form {expected}"
            )));
        }
        measured
    } else if dual {
        dual_dist
    } else {
        primal
    };
    #[derive(Serialize)]
    struct Out<'a> {
        q: u64,
        n: usize,
        dim: usize,
        dual: bool,
        method: &'static str,
        distribution: &'a WeightDistribution,
    }
    let out = Out {
        q: args.q,
        n,
        dim: if dual { n - dim } else { dim },
        dual,
        method: if brute { "brute" } else { "formula" },
        distribution: &dist,
    };
    emit(json, &out, || {
        let mut s = format!("{}\n", dist);
        for w in dist.nonzero_weights() {
            s.push_str(&format!("A_{w} = {}\n", dist.get(w)));
        }
        s.trim_end().to_string()
    });
    Ok(())
}

fn cmd_verify_design(args: &CodeArgs, t: usize, dual: bool, json: bool, budget: &Budget) -> Result<()> {
    let pl = pipeline(args, budget)?;
    let family = min_weight_supports(&pl.curve, &pl.divisor, budget)?;
    let primal = DesignInstance::new(pl.code.len(), family.weight, family.blocks)?;
    let inst = if dual { primal.complement() } else { primal };
    let report = verify_design(&inst, t, budget)?;
    let (_, blocks, lambda, lambda_dual) = closed_forms(args.p, args.q, args.k)?;
    let closed = if dual { lambda_dual } else { lambda };
    if num_bigint_of(report.b) != blocks {
        return Err(Error::CertificationMismatch(format!(
            "{} blocks enumerated, closed form gives {blocks}",
            report.b
        )));
    }
    if t == 2 && report.lambda.map(num_bigint_of) != Some(closed.clone()) {
        return Err(Error::CertificationMismatch(format!(
            "measured lambda {:?}, closed form {closed}",
            report.lambda
        )));
    }
    #[derive(Serialize)]
    struct Out<'a> {
        dual: bool,
        report: &'a DesignCheckReport,
        closed_form_lambda: Option<String>,
    }
    let out = Out {
        dual,
        report: &report,
        closed_form_lambda: (t == 2).then(|| closed.to_string()),
    };
    emit(json, &out, || {
        let mut s = match report.lambda {
            Some(l) if report.is_design => format!(
                "{}-({},{},{}) design, {} blocks, simple: {}",
                t, report.v, report.block_size, l, report.b, report.simple
            ),
            _ => format!("not a {t}-design ({} blocks of size {})", report.b, report.block_size),
        };
        if let Some(c) = &out.closed_form_lambda {
            s.push_str(&format!("\nclosed-form lambda: {c}"));
        }
        s
    });
    Ok(())
}

/// Extension-field point as `(x, y)` with y written in the root alpha of the modulus.
fn format_point(pt: &nmds_core::elliptic_curve::Point) -> String {
    let alpha = |e: &nmds_core::finite_field::FieldElement| {
        let terms: Vec<String> = e
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".into(),
                (1, c) => format!("{c}a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    };
    match (pt.x(), pt.y()) {
        (Some(x), Some(y)) => format!("({}, {})", alpha(x), alpha(y)),
        _ => "O".into(),
    }
}

fn num_bigint_of(v: u64) -> num_bigint::BigUint {
    num_bigint::BigUint::from(v)
}

fn cmd_verify_nmds(args: &CodeArgs, json: bool, budget: &Budget) -> Result<()> {
    let pl = pipeline(args, budget)?;
    let structural = nmds_structural_check(pl.code.generator(), budget)?;
    let dual = dual_code(&pl.code);
    let n = pl.code.len();
    let two_k = 2 * pl.k;
    // disjoint pairing needs the dual's minimum-weight supports by sweep
    let pairing = match supports_by_weight_bruteforce(&dual, budget) {
        Ok(mut by_weight) => {
            let primal = min_weight_supports(&pl.curve, &pl.divisor, budget)?.blocks;
            let dual_blocks = by_weight.swap_remove(two_k);
            let matched = disjoint_support_pairing(&primal, &dual_blocks);
            let mut targets: Vec<usize> = matched.iter().flatten().copied().collect();
            targets.sort_unstable();
            targets.dedup();
            Some((primal.len(), dual_blocks.len(), targets.len()))
        }
        Err(Error::BudgetExceeded { .. }) | Err(Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    #[derive(Serialize)]
    struct Pairing {
        primal_blocks: usize,
        dual_blocks: usize,
        matched: usize,
    }
    #[derive(Serialize)]
    struct Out {
        n: usize,
        dim: usize,
        class: CodeClass,
        structural: bool,
        pairing: Option<Pairing>,
    }
    let out = Out {
        n,
        dim: pl.code.dim(),
        class: pl.classification.class,
        structural,
        pairing: pairing.map(|(primal_blocks, dual_blocks, matched)| Pairing {
            primal_blocks,
            dual_blocks,
            matched,
        }),
    };
    emit(json, &out, || {
        let mut s = format!(
            "[{},{}] code: {} by subset sums; column conditions hold: {}",
            out.n, out.dim, out.class, out.structural
        );
        match &out.pairing {
            Some(pr) => s.push_str(&format!(
                "\ndisjoint support pairing: {} of {} primal blocks matched to distinct dual blocks ({} dual blocks)",
                pr.matched, pr.primal_blocks, pr.dual_blocks
            )),
            None => s.push_str("\ndisjoint support pairing: skipped (dual sweep out of budget)"),
        }
        s
    });
    if !structural && out.class == CodeClass::Nmds {
        return Err(Error::CertificationMismatch(
            "subset sums say NMDS but the column conditions fail".into(),
        ));
    }
    Ok(())
}

fn cmd_subset_count(
    group: &str,
    k: u64,
    x: &str,
    nonzero: bool,
    oracle: bool,
    json: bool,
    budget: &Budget,
) -> Result<()> {
    let g = AbelianGroup::parse(group)?;
    let x = g.parse_element(x)?;
    let count = if nonzero {
        count_subsets_nonzero(&g, k, &x)?
    } else {
        count_subsets_full(&g, k, &x)?
    };
    if oracle {
        let literal = brute_force_counts(&g, k, &x, nonzero, budget)?;
        if num_bigint_of(literal) != count {
            return Err(Error::CertificationMismatch(format!(
                "closed form {count}, enumeration {literal}"
            )));
        }
    }
    #[derive(Serialize)]
    struct Out {
        group: String,
        k: u64,
        x: String,
        nonzero: bool,
        count: String,
    }
    let out = Out {
        group: g.to_string(),
        k,
        x: x.to_string(),
        nonzero,
        count: count.to_string(),
    };
    emit(json, &out, || out.count.clone());
    Ok(())
}
