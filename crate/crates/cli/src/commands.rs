//! Command implementations. Each returns a [`Report`] or a [`CliError`].

use ppav_core::exact::{int, rat};
use ppav_core::fixtures;
use ppav_core::forms::{induced_metric, is_coherent, tame_with_tol, MetricForm, SkewForm};
use ppav_core::genus::{
    a_hat_series, chern_character, cp3, line_bundle_ch, torus, twisted_k_pairing,
    unimodularity_report, CohomologyRingModel, RingElement,
};
use ppav_core::hodge::{
    check_riemann, curve_polarization, determinant_closed_form, etau_build, even_to_weight_one,
    nonholomorphy_probe, plucker_ratio_closed_form, printed_second_plucker, torus_module,
    weight_one_curve, weil_jacobian, HodgeStructure, PolarizationForm,
};
use ppav_core::lattice::{build_ppav, ppav_from_structure, IntegralSkewForm};
use ppav_core::linalg::{min_sym_eigenvalue, rel_diff, RMat};
use ppav_core::siegel::{
    dictionary_report, distance, pair_to_siegel, siegel_to_structure, SiegelPoint,
};
use ppav_core::theta::{
    characteristic_from_multiplier, enumerate_multipliers, multiplier_from_basis,
    multiplier_from_characteristic, theta_eval, Characteristic, Parity,
};
use ppav_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::{
    complex_json, complex_matrix_json, integer_json, integral_form, parse_complex,
    parse_complex_vector, parse_i64_list, parse_rational_list, rational_json, read_json, real_json,
    show_complex, siegel_json, CliError, CliResult, HodgeJson, PairJson, RingJson, SiegelJson,
};
use crate::report::Report;
use crate::{
    Cli, Command, GenusCommand, HodgeCommand, HodgeFixture, MultiplierCommand, PeriodSource,
    RingArgs, RingFixture, TameSource,
};

pub fn dispatch(cli: &Cli) -> CliResult<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Tame(args) => tame(&args.source, cli.tol),
        Command::Period(args) => period(&args.source),
        Command::Ppav(args) => ppav(&read_json(&args.pair)?),
        Command::Theta(args) => theta(
            &args.source,
            args.characteristic.as_deref(),
            args.z.as_deref(),
            cli.tol,
        ),
        Command::Genus(cmd) => genus(cmd),
        Command::Hodge(cmd) => hodge(cmd, &mut rng, cli.tol),
        Command::Multiplier(cmd) => multiplier(cmd, &mut rng),
    }
}

fn siegel_point(source: &PeriodSource) -> CliResult<SiegelPoint> {
    match (&source.period, &source.tau) {
        (Some(path), _) => read_json::<SiegelJson>(path)?.point(),
        (None, Some(tau)) => {
            let t = parse_complex(tau)?;
            Ok(SiegelPoint::new(ppav_core::linalg::CMat::from_element(
                1, 1, t,
            ))?)
        }
        (None, None) => Err(CliError::Input("give --period or --tau".into())),
    }
}

fn tame(source: &TameSource, tol: f64) -> CliResult<Report> {
    let (b, w) = if let Some(path) = &source.pair {
        let pair: PairJson = read_json(path)?;
        (pair.metric()?, pair.skew()?)
    } else if let Some(g) = source.identity {
        if g == 0 {
            return Err(CliError::Input("--identity needs g >= 1".into()));
        }
        (MetricForm::identity(2 * g), SkewForm::standard(g))
    } else {
        let z = siegel_point(&PeriodSource {
            period: source.period.clone(),
            tau: source.tau.clone(),
        })?;
        (siegel_to_structure(&z)?.1, SkewForm::standard(z.g()))
    };
    let j = tame_with_tol(&b, &w, tol)?;
    let metric = induced_metric(&w, &j)?;
    let lambda = is_coherent(&b, &w, tol);
    let period = integral_form(w.gram())
        .ok()
        .and_then(|iw| ppav_from_structure(j.clone(), &iw).ok())
        .and_then(|p| p.siegel_point);
    Ok(Report::new(json!({
        "j": real_json(j.matrix()),
        "induced_metric": real_json(metric.gram()),
        "coherent": lambda.is_some(),
        "lambda": lambda,
        "siegel_point": period.as_ref().map(siegel_json),
    })))
}

fn period(source: &PeriodSource) -> CliResult<Report> {
    let z = siegel_point(source)?;
    let (j, b) = siegel_to_structure(&z)?;
    let back = pair_to_siegel(&b)?;
    let report = dictionary_report(&z)?;
    let json = json!({
        "siegel_point": siegel_json(&z),
        "j": real_json(j.matrix()),
        "metric": real_json(b.gram()),
        "round_trip": siegel_json(&back),
        "round_trip_distance": distance(&back, &z),
        "dictionary": {
            "printed_j_residual": report.printed_j_residual,
            "negated_printed_j_residual": report.negated_printed_j_residual,
            "printed_b_residual": report.printed_b_residual,
            "corrected_b_residual": report.corrected_b_residual,
            "printed_j_tames": report.printed_j_tames,
            "direct_j_tames": report.direct_j_tames,
        },
    });
    let mut text = Report::new(json.clone()).render(crate::report::Format::Text);
    text.push_str(&report.to_string());
    Ok(Report::with_text(
        json,
        text.lines().map(String::from).collect(),
    ))
}

fn ppav(pair: &PairJson) -> CliResult<Report> {
    let b = pair.metric()?;
    let w = pair.integral_skew()?;
    let p = build_ppav(&b, &w)?;
    let basis: Vec<Vec<i64>> = (0..p.rank)
        .map(|i| (0..p.rank).map(|k| i64::from(i == k)).collect())
        .collect();
    let (min_positivity, invariance) = p.riemann_form_check(&basis);
    Ok(Report::new(json!({
        "J": real_json(p.j.matrix()),
        "omega": integer_json(p.omega.gram()),
        "principal": p.principal,
        "siegel_point": p.siegel_point.as_ref().map(siegel_json),
        "hermitian_form": complex_matrix_json(&p.h),
        "riemann_form": { "min_on_basis": min_positivity, "invariance_residual": invariance },
    })))
}

fn theta(source: &PeriodSource, ch: Option<&str>, z: Option<&str>, tol: f64) -> CliResult<Report> {
    let period = siegel_point(source)?;
    let g = period.g();
    let ch = match ch {
        Some(s) => Characteristic::parse(s)?,
        None => Characteristic::zero(g),
    };
    let arg = match z {
        Some(s) => parse_complex_vector(s)?,
        None => vec![ppav_core::linalg::C64::new(0.0, 0.0); g],
    };
    let v = theta_eval(&period, &ch, &arg, tol)?;
    Ok(Report::new(json!({
        "value": complex_json(v.value),
        "radius": v.radius,
        "terms": v.terms,
    })))
}

fn ring_model(args: &RingArgs) -> CliResult<(CohomologyRingModel, RingElement)> {
    let model = match (&args.fixture, &args.model) {
        (Some(RingFixture::Cp3), _) => cp3(),
        (Some(RingFixture::Torus), _) => torus(),
        (None, Some(path)) => read_json::<RingJson>(path)?.build()?,
        (None, None) => return Err(CliError::Input("give --fixture or --model".into())),
    };
    let a = match (&args.a, &args.fixture) {
        (Some(s), _) => model.element(parse_rational_list(s)?)?,
        (None, Some(RingFixture::Cp3)) => {
            model.element(vec![int(1), int(0), rat(-1, 6), int(0)])?
        }
        (None, _) => model.one(),
    };
    Ok((model, a))
}

fn ring_class(
    model: &CohomologyRingModel,
    coeffs: Option<&String>,
    line: Option<i64>,
    name: &str,
) -> CliResult<RingElement> {
    match (coeffs, line) {
        (Some(s), _) => Ok(model.element(parse_rational_list(s)?)?),
        (None, Some(k)) if model.basis().len() > 1 => Ok(line_bundle_ch(model, k)),
        _ => Err(CliError::Input(format!(
            "give the {name} class as coefficients or a line bundle twist"
        ))),
    }
}

fn genus(cmd: &GenusCommand) -> CliResult<Report> {
    match cmd {
        GenusCommand::Ahat { order } => {
            check_order(*order)?;
            let terms: Vec<String> = a_hat_series(*order)
                .iter()
                .map(ToString::to_string)
                .collect();
            let line = terms.join(" ; ");
            Ok(Report::with_text(
                json!({ "order": order, "terms": terms }),
                vec![line],
            ))
        }
        GenusCommand::Ch { rank, order } => {
            check_order(*order)?;
            let ch = chern_character(*rank, *order, 0)?;
            let terms: Vec<String> = ch.iter().map(ToString::to_string).collect();
            let lines = terms
                .iter()
                .enumerate()
                .map(|(k, t)| format!("ch_{k} = {t}"))
                .collect();
            Ok(Report::with_text(
                json!({ "rank": rank, "order": order, "terms": terms }),
                lines,
            ))
        }
        GenusCommand::Pair { ring, x, y, s, t } => {
            let (model, a) = ring_model(ring)?;
            let xe = ring_class(&model, x.as_ref(), *s, "first")?;
            let ye = ring_class(&model, y.as_ref(), *t, "second")?;
            let v = twisted_k_pairing(&model, &a, &xe, &ye)?;
            let json = json!({
                "a": model.format(&a),
                "x": model.format(&xe),
                "y": model.format(&ye),
                "value": v.to_string(),
            });
            Ok(Report::with_text(json, vec![format!("pairing = {v}")]))
        }
        GenusCommand::Unimodular { ring } => {
            let (model, a) = ring_model(ring)?;
            let r = unimodularity_report(&model, &a)?;
            Ok(Report::new(json!({
                "a": model.format(&a),
                "gram": integer_json(&r.gram),
                "antisymmetric": r.gram.is_antisymmetric(),
                "determinant": r.determinant.to_string(),
                "unimodular": r.unimodular,
            })))
        }
    }
}

fn check_order(order: usize) -> CliResult<()> {
    if !(1..=12).contains(&order) {
        return Err(CliError::Input(format!("order {order} must lie in 1..=12")));
    }
    Ok(())
}

fn hodge_source(
    structure: Option<&std::path::PathBuf>,
    fixture: Option<HodgeFixture>,
    tau: Option<&String>,
    scale: i64,
    rng: &mut ChaCha8Rng,
) -> CliResult<(HodgeStructure, PolarizationForm)> {
    if let Some(path) = structure {
        return read_json::<HodgeJson>(path)?.build();
    }
    match fixture {
        Some(HodgeFixture::Curve) => {
            let t = parse_complex(tau.map_or("0+1i", String::as_str))?;
            Ok((weight_one_curve(t)?, curve_polarization()))
        }
        Some(HodgeFixture::Weight2) => Ok(fixtures::random_weight_two(rng, scale)),
        Some(HodgeFixture::Weight3) => Ok(fixtures::random_weight_three(rng)),
        Some(other) => Err(CliError::Input(format!(
            "fixture {other:?} is not a Hodge structure"
        ))),
        None => Err(CliError::Input("give --structure or --fixture".into())),
    }
}

fn hodge(cmd: &HodgeCommand, rng: &mut ChaCha8Rng, tol: f64) -> CliResult<Report> {
    match cmd {
        HodgeCommand::Weil {
            structure,
            fixture,
            tau,
        } => {
            let (hs, q) = hodge_source(structure.as_ref(), *fixture, tau.as_ref(), 1, rng)?;
            let c = hs.weil_operator()?;
            let rc = check_riemann(&hs, &q)?;
            let numbers: Vec<Value> = hs
                .hodge_numbers()
                .iter()
                .map(|(p, qq, h)| json!({ "p": p, "q": qq, "h": h }))
                .collect();
            let jacobian = if hs.weight() % 2 != 0 {
                let wj = weil_jacobian(&hs, &q)?;
                json!({
                    "g": wj.ppav.g(),
                    "sign": wj.sign,
                    "principal": wj.ppav.principal,
                    "siegel_point": wj.ppav.siegel_point.as_ref().map(siegel_json),
                })
            } else {
                Value::Null
            };
            Ok(Report::new(json!({
                "weight": hs.weight(),
                "hodge_numbers": numbers,
                "weil_operator": real_json(c.matrix()),
                "riemann": {
                    "first": rc.first,
                    "second": rc.second,
                    "orthogonality_residual": rc.orthogonality_residual,
                    "min_positivity": rc.min_positivity,
                },
                "jacobian": jacobian,
            })))
        }
        HodgeCommand::Even {
            structure,
            fixture,
            scale,
        } => {
            let (hs, q) = hodge_source(structure.as_ref(), *fixture, None, *scale, rng)?;
            let t = even_to_weight_one(&hs, &q)?;
            let det = t.q.determinant();
            Ok(Report::new(json!({
                "j": real_json(t.j.matrix()),
                "q": rational_json(&t.q),
                "q_convention": rational_json(&t.q_convention),
                "q_determinant": det.to_string(),
                "q_unimodular": det == int(1) || det == int(-1),
                "polarization_unimodular": q.is_unimodular(),
            })))
        }
        HodgeCommand::Lefschetz { fixture, source } => {
            if !matches!(fixture, HodgeFixture::Torus) {
                return Err(CliError::Input(
                    "lefschetz supports only the torus fixture".into(),
                ));
            }
            let z = match (&source.period, source.g) {
                (Some(path), _) => read_json::<SiegelJson>(path)?.point()?,
                (None, Some(g)) if (1..=4).contains(&g) => fixtures::random_siegel(rng, g),
                (None, g) => return Err(CliError::Input(format!("--g {g:?} must lie in 1..=4"))),
            };
            lefschetz(&z, rng, tol)
        }
        HodgeCommand::Etau { tau, step } => etau(parse_complex(tau)?, *step),
    }
}

fn lefschetz(z: &SiegelPoint, rng: &mut ChaCha8Rng, tol: f64) -> CliResult<Report> {
    let module = torus_module(z)?;
    let d = module.d();
    let mut degrees = Vec::new();
    for k in 0..=2 * d {
        let n = module.dims()[k];
        let primitive = if k <= d {
            module.primitive_basis(k)?.ncols()
        } else {
            0
        };
        let x = RMat::from_column_slice(n, 1, &fixtures::random_vector(rng, n));
        let parts = module.primitive_decomposition(&x, k)?;
        let reassembly = rel_diff(&module.reassemble(&parts, k)?, &x);
        let q = module.riemann_gram(k)?;
        let wrong = if k % 2 == 0 {
            &q - q.transpose()
        } else {
            &q + q.transpose()
        };
        let parity = wrong.norm() / q.norm().max(1e-300);
        let b = module.riemann_weil_gram(k)?;
        let gap = rel_diff(&module.hodge_metric_gram(k)?, &b);
        let min_eig = min_sym_eigenvalue(&b);
        if min_eig <= 0.0 || reassembly > tol.max(1e-12) || parity > tol.max(1e-12) {
            return Err(Error::Postcondition(format!(
                "degree {k}: min eigenvalue {min_eig:.3e}, reassembly {reassembly:.3e}, parity {parity:.3e}"
            ))
            .into());
        }
        degrees.push(json!({
            "k": k,
            "dim": n,
            "primitive_dim": primitive,
            "reassembly": reassembly,
            "parity_defect": parity,
            "hodge_metric_gap": gap,
            "min_eigenvalue": min_eig,
        }));
    }
    Ok(Report::new(
        json!({ "d": d, "siegel_point": siegel_json(z), "degrees": degrees }),
    ))
}

fn etau(tau: ppav_core::linalg::C64, step: f64) -> CliResult<Report> {
    let e = etau_build(tau)?;
    let det = e.determinant();
    let closed = determinant_closed_form(tau);
    let rel = (det - closed).norm() / closed.norm();
    let second = e.second_plucker();
    let printed = printed_second_plucker(tau);
    let mut text = vec![
        format!("tau = {}", show_complex(tau)),
        format!("det(M;N) = {}", show_complex(det)),
        format!(
            "closed form (tau-conj(tau))(tau^2+6|tau|^2+conj(tau)^2) = {}",
            show_complex(closed)
        ),
        format!("relative difference = {rel:.3e}"),
        format!("kernel residual = {:.3e}", e.kernel_residual()),
        format!(
            "second Pluecker coordinate (columns 7,1,2,3) = {}; printed formula gives {}",
            show_complex(second),
            show_complex(printed)
        ),
    ];
    let mut json = json!({
        "tau": complex_json(tau),
        "determinant": complex_json(det),
        "determinant_closed_form": complex_json(closed),
        "relative_difference": rel,
        "kernel_residual": e.kernel_residual(),
        "second_plucker": complex_json(second),
        "printed_second_plucker": complex_json(printed),
        "ratio": Value::Null,
        "ratio_closed_form": Value::Null,
        "wirtinger": Value::Null,
    });
    match (e.plucker_ratio(), plucker_ratio_closed_form(tau)) {
        (Ok(r), Ok(rc)) => {
            text.push(format!(
                "ratio det1/det2 = {}; closed form {}",
                show_complex(r),
                show_complex(rc)
            ));
            json["ratio"] = complex_json(r);
            json["ratio_closed_form"] = complex_json(rc);
            let (dbar, d) = nonholomorphy_probe(tau, step)?;
            text.push(format!(
                "Wirtinger derivatives of the ratio: |d/d(conj tau)| = {:.6}, |d/d tau| = {:.6}",
                dbar.norm(),
                d.norm()
            ));
            json["wirtinger"] =
                json!({ "d_conj_tau": complex_json(dbar), "d_tau": complex_json(d), "step": step });
        }
        _ => text.push(
            "ratio det1/det2 undefined: the second coordinate vanishes when Re tau = 0".into(),
        ),
    }
    Ok(Report::with_text(json, text))
}

fn standard_lattice(len: usize) -> CliResult<IntegralSkewForm> {
    if len == 0 || len % 2 != 0 {
        return Err(CliError::Input(format!("need 2g basis values, got {len}")));
    }
    Ok(IntegralSkewForm::standard(len / 2))
}

fn parse_signs(s: &str) -> CliResult<Vec<i8>> {
    parse_i64_list(s)?
        .into_iter()
        .map(|v| match v {
            1 => Ok(1),
            -1 => Ok(-1),
            _ => Err(CliError::Input(format!(
                "multiplier values must be 1 or -1, got {v}"
            ))),
        })
        .collect()
}

fn signs(v: &[i8]) -> String {
    v.iter()
        .map(|x| if *x > 0 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(",")
}

fn multiplier(cmd: &MultiplierCommand, rng: &mut ChaCha8Rng) -> CliResult<Report> {
    match cmd {
        MultiplierCommand::Enum { g } => {
            if !(1..=4).contains(g) {
                return Err(CliError::Input(format!("g = {g} must lie in 1..=4")));
            }
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for m in enumerate_multipliers(*g)? {
                let ch = characteristic_from_multiplier(&m)?;
                let eps = m.basis_values();
                text.push(format!("{}  {}  {}", signs(&eps), ch, ch.parity()));
                rows.push(json!({ "values": eps, "characteristic": ch.to_string(), "parity": ch.parity().to_string() }));
            }
            let odd = rows.iter().filter(|r| r["parity"] == "odd").count();
            Ok(Report::with_text(
                json!({ "g": g, "count": rows.len(), "odd": odd, "multipliers": rows }),
                text,
            ))
        }
        MultiplierCommand::Char {
            eps,
            characteristic,
        } => match (eps, characteristic) {
            (Some(e), _) => {
                let eps = parse_signs(e)?;
                let m = multiplier_from_basis(&eps, &standard_lattice(eps.len())?)?;
                let ch = characteristic_from_multiplier(&m)?;
                Ok(Report::new(json!({
                    "values": eps,
                    "characteristic": ch.to_string(),
                    "parity": ch.parity().to_string(),
                })))
            }
            (None, Some(c)) => {
                let ch = Characteristic::parse(c)?;
                let m = multiplier_from_characteristic(&ch, &IntegralSkewForm::standard(ch.g()))?;
                Ok(Report::new(json!({
                    "values": m.basis_values(),
                    "characteristic": ch.to_string(),
                    "parity": ch.parity().to_string(),
                })))
            }
            (None, None) => Err(CliError::Input("give --eps or --char".into())),
        },
        MultiplierCommand::Check { eps, samples } => {
            let eps = parse_signs(eps)?;
            let n = eps.len();
            let m = multiplier_from_basis(&eps, &standard_lattice(n)?)?;
            for _ in 0..*samples {
                let x: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
                let y: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
                if !m.cocycle_holds(&x, &y)? {
                    return Err(Error::Postcondition(format!(
                        "cocycle law fails at x = {x:?}, y = {y:?}"
                    ))
                    .into());
                }
            }
            let ch = characteristic_from_multiplier(&m)?;
            let parity = ch.parity();
            Ok(Report::new(json!({
                "values": eps,
                "samples": samples,
                "cocycle": true,
                "characteristic": ch.to_string(),
                "parity": parity.to_string(),
                "odd": parity == Parity::Odd,
            })))
        }
    }
}
