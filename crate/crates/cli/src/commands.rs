use nalgebra::DMatrix;
use serde_json::{json, Value};
use vibsim::doktorov::{build_doktorov_encoded, franck_condon_factor, DoktorovMethod, OverlapReadout};
use vibsim::dynamics::{observable_trajectory, TermOrder};
use vibsim::encoding::{encode_operator, qubit_count, single_op};
use vibsim::io::{DuschinskyFile, HARTREE_TO_CM1};
use vibsim::uvcc::{build_circuit, enumerate_excitations, vqe_minimize, GateOrdering, Reference, VqeOptions};
use vibsim::vscf::{vscf, VscfOptions};
use vibsim::{
    build_qubit_hamiltonian, exact_spectrum, EncodingScheme, ForceField, HamiltonianOptions, LadderKind, ModeBasis,
    SchemeKind, StateVector, VibError, VibHamiltonian,
};

use crate::args::*;
use crate::report::{emit, json_document, sha256_hex, Header};
use crate::CliError;

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(a) => spectrum(a),
        Command::Vqe(a) => vqe(a),
        Command::Vscf(a) => run_vscf(a),
        Command::Dynamics(a) => dynamics(a),
        Command::FranckCondon(a) => franck_condon(a),
        Command::EncodeInfo(a) => encode_info(a),
    }
}

fn load_force_field(source: &str) -> Result<ForceField, CliError> {
    match source {
        "h2o" => Ok(ForceField::h2o()),
        "so2" => Ok(ForceField::so2()),
        path => ForceField::from_path(path).map_err(|e| match e {
            VibError::Io(io) => CliError::Config(format!("cannot read force field {path}: {io}")),
            other => other.into(),
        }),
    }
}

fn ff_record(source: &str, ff: &ForceField) -> Result<Value, CliError> {
    Ok(json!({
        "source": source,
        "label": ff.label,
        "modes": ff.modes(),
        "sha256": sha256_hex(&ff.to_json_string()?),
    }))
}

fn scheme_kind(s: SchemeArg) -> SchemeKind {
    match s {
        SchemeArg::Direct => SchemeKind::Direct,
        SchemeArg::Compact => SchemeKind::Compact,
    }
}

fn check_finite(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be finite, got {value}")))
    }
}

/// Force field, Hamiltonian and the config fragment describing them.
struct System {
    hamiltonian: VibHamiltonian,
    config: Value,
}

fn build_system(a: &SystemArgs, basis: ModeBasis) -> Result<System, CliError> {
    if !(2..=4).contains(&a.order) {
        return Err(CliError::Config(format!("--order must be 2, 3 or 4, got {}", a.order)));
    }
    let ff = load_force_field(&a.ff)?;
    let scheme = EncodingScheme::new(scheme_kind(a.scheme), a.d, ff.modes())?;
    let opts = HamiltonianOptions { order: a.order, zero_point: !a.no_zero_point, ..Default::default() };
    let config = json!({
        "force_field": ff_record(&a.ff, &ff)?,
        "d": a.d,
        "scheme": a.scheme.name(),
        "order": a.order,
        "zero_point": opts.zero_point,
        "threshold": opts.threshold,
    });
    let hamiltonian = build_qubit_hamiltonian(&ff, &scheme, &basis, &opts)?;
    Ok(System { hamiltonian, config })
}

fn with_fields(mut base: Value, command: &str, extra: Value) -> Value {
    let map = base.as_object_mut().expect("config fragments are objects");
    map.insert("command".into(), command.into());
    if let Value::Object(extra) = extra {
        map.extend(extra);
    }
    base
}

fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let sys = build_system(&a.system, ModeBasis::Normal)?;
    let dim = sys.hamiltonian.scheme.fock_dim();
    let levels = a.levels.unwrap_or(dim).min(dim);
    if levels == 0 {
        return Err(CliError::Config("--levels must be positive".into()));
    }
    let config = with_fields(sys.config, "spectrum", json!({ "levels": levels, "cm1": a.cm1 }));
    let header = Header::new(config);
    let energies = exact_spectrum(&sys.hamiltonian, levels)?;
    let (scale, note, unit) =
        if a.cm1 { (HARTREE_TO_CM1, Some("energy columns in cm^-1"), "cm1") } else { (1.0, None, "hartree") };
    let mut out = header.csv_lines(note);
    out.push_str(&format!("index,energy_{unit},energy_relative_to_ground\n"));
    for (k, e) in energies.iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", e * scale, (e - energies[0]) * scale));
    }
    emit(&out, a.out.output.as_deref())
}

fn vqe(a: &VqeArgs) -> Result<(), CliError> {
    for (name, v) in [("step", a.step), ("grad-eps", a.grad_eps), ("perturbation", a.perturbation)] {
        check_finite(name, v)?;
    }
    let sys = build_system(&a.system, ModeBasis::Normal)?;
    let h = &sys.hamiltonian;
    let reference = match a.reference {
        ReferenceArg::Harmonic => Reference::HarmonicGround,
        ReferenceArg::Vscf => Reference::Vscf(vscf(h, &VscfOptions::default())?.orbitals),
    };
    let ordering = match a.ordering {
        OrderingArg::Canonical => GateOrdering::Canonical,
        OrderingArg::Reversed => GateOrdering::Reversed,
    };
    let excitations = enumerate_excitations(h.scheme.modes, h.scheme.levels, a.rank)?;
    let circuit = build_circuit(&excitations, &h.scheme, ordering, reference)?;
    let opts = VqeOptions {
        step: a.step,
        max_iter: a.max_iter,
        grad_eps: a.grad_eps,
        init_perturbation: a.perturbation,
        seed: a.seed,
        pure_gd: a.pure_gd,
        ..Default::default()
    };
    let config = with_fields(
        sys.config,
        "vqe",
        json!({
            "rank": a.rank,
            "reference": format!("{:?}", a.reference).to_lowercase(),
            "ordering": ordering,
            "optimizer": opts,
        }),
    );
    let header = Header::new(config);
    let r = vqe_minimize(h, &circuit, &opts)?;
    let trace: Vec<Value> =
        r.trace.iter().map(|s| json!({ "iter": s.iter, "energy": s.energy, "grad_norm": s.grad_norm })).collect();
    let result = json!({
        "energy": r.energy,
        "converged": r.converged,
        "evaluations": r.evaluations,
        "gates": circuit.gate_count(),
        "parameters": r.theta,
        "trace": trace,
    });
    emit(&json_document(&header, result)?, a.out.output.as_deref())
}

fn run_vscf(a: &VscfArgs) -> Result<(), CliError> {
    check_finite("tol", a.tol)?;
    check_finite("damping", a.damping)?;
    let sys = build_system(&a.system, ModeBasis::Normal)?;
    let opts = VscfOptions { tol: a.tol, max_iter: a.max_iter, damping: a.damping };
    let header = Header::new(with_fields(sys.config, "vscf", json!({ "solver": opts })));
    let r = vscf(&sys.hamiltonian, &opts)?;
    let result = json!({
        "energy": r.energy,
        "iterations": r.iterations,
        "converged": r.converged,
        "energy_trace": r.energy_trace,
        "orbitals": r.orbitals,
    });
    emit(&json_document(&header, result)?, a.out.output.as_deref())
}

fn read_square_matrix(path: &std::path::Path) -> Result<(DMatrix<f64>, Value), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(VibError::from)?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{} is not a square matrix", path.display())));
    }
    Ok((DMatrix::from_fn(n, n, |i, j| rows[i][j]), json!(rows)))
}

fn dynamics(a: &DynamicsArgs) -> Result<(), CliError> {
    check_finite("time", a.time)?;
    if a.time < 0.0 {
        return Err(CliError::Config("--time must be non-negative".into()));
    }
    if a.points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let (basis, localize) = match &a.localize {
        Some(path) => {
            let (u, record) = read_square_matrix(path)?;
            (ModeBasis::Localized(u), record)
        }
        None => (ModeBasis::Normal, Value::Null),
    };
    let sys = build_system(&a.system, basis)?;
    let h = &sys.hamiltonian;
    let modes = h.scheme.modes;
    let initial = a.initial.clone().unwrap_or_else(|| vec![0; modes]);
    if initial.len() != modes {
        return Err(CliError::Config(format!("--initial lists {} occupations for {modes} modes", initial.len())));
    }
    let config = with_fields(
        sys.config,
        "dynamics",
        json!({
            "time": a.time,
            "points": a.points,
            "steps_per_unit": a.steps_per_unit,
            "initial": initial,
            "localize": localize,
            "term_order": "canonical",
        }),
    );
    let header = Header::new(config);
    let s0 = h.basis_state(&initial)?;
    let mut observables = (0..modes)
        .map(|m| encode_operator(&single_op(LadderKind::Number, m), &h.scheme))
        .collect::<Result<Vec<_>, _>>()?;
    observables.push(h.qubit_form.clone());
    let times: Vec<f64> = (0..a.points).map(|k| a.time * k as f64 / (a.points - 1) as f64).collect();
    let tr = observable_trajectory(&s0, &h.qubit_form, &observables, &times, a.steps_per_unit, &TermOrder::Canonical)?;
    let mut out = header.csv_lines(None);
    out.push_str("time");
    for m in 0..modes {
        out.push_str(&format!(",n_{m}"));
    }
    out.push_str(",energy\n");
    for (t, row) in tr.times.iter().zip(&tr.values) {
        out.push_str(&t.to_string());
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    emit(&out, a.out.output.as_deref())
}

fn franck_condon(a: &FranckCondonArgs) -> Result<(), CliError> {
    let ff_i = load_force_field(&a.ff_initial)?;
    let ff_f = load_force_field(&a.ff_final)?;
    let dusch_file = DuschinskyFile::from_path(&a.duschinsky).map_err(|e| match e {
        VibError::Io(io) => CliError::Config(format!("cannot read {}: {io}", a.duschinsky.display())),
        other => other.into(),
    })?;
    let base = dusch_file.into_data(&ff_i, &ff_f)?;
    let omega_ref = match a.omega_ref {
        Some(w) => w,
        None => base.geometric_mean_frequency(),
    };
    let dusch = base.with_reference(omega_ref)?;
    let scheme = EncodingScheme::new(scheme_kind(a.scheme), a.d, dusch.modes())?;
    let method = match a.method {
        MethodArg::Dense => DoktorovMethod::DenseExp,
        MethodArg::Trotter if a.trotter_steps == 0 => {
            return Err(CliError::Config("--trotter-steps must be positive".into()));
        }
        MethodArg::Trotter => DoktorovMethod::Trotter(a.trotter_steps),
    };
    let readout = match a.shots {
        Some(0) => return Err(CliError::Config("--shots must be positive".into())),
        Some(shots) => OverlapReadout::SwapTest { shots, seed: a.seed },
        None => OverlapReadout::Exact,
    };
    let config = json!({
        "command": "franck-condon",
        "ff_initial": ff_record(&a.ff_initial, &ff_i)?,
        "ff_final": ff_record(&a.ff_final, &ff_f)?,
        "duschinsky": dusch_file,
        "omega_ref": omega_ref,
        "d": a.d,
        "scheme": a.scheme.name(),
        "method": method,
        "max_initial_quanta": a.max_initial_quanta,
        "readout": readout,
    });
    let header = Header::new(config);
    let op = build_doktorov_encoded(&dusch, &scheme, method)?;
    let dim = scheme.fock_dim();
    let initial: Vec<usize> =
        (0..dim).filter(|&f| scheme.occupations(f).iter().sum::<usize>() <= a.max_initial_quanta).collect();
    let state = |f: usize| -> Result<StateVector, VibError> {
        StateVector::basis(scheme.n_qubits(), scheme.basis_index(&scheme.occupations(f))?)
    };
    let mut out = header.csv_lines(None);
    out.push_str("i_index,f_index,fc_factor\n");
    for &i in &initial {
        let psi_i = state(i)?;
        for f in 0..dim {
            let fc = match readout {
                OverlapReadout::Exact => op.matrix[(f, i)].norm_sqr(),
                OverlapReadout::SwapTest { shots, seed } => {
                    let pair_seed = seed.wrapping_add((i * dim + f) as u64);
                    franck_condon_factor(&psi_i, &state(f)?, &op, OverlapReadout::SwapTest { shots, seed: pair_seed })?
                }
            };
            out.push_str(&format!("{i},{f},{fc}\n"));
        }
    }
    emit(&out, a.out.output.as_deref())
}

fn encode_info(a: &EncodeInfoArgs) -> Result<(), CliError> {
    let direct = qubit_count(a.atoms, a.linear, a.d, SchemeKind::Direct)?;
    let compact = qubit_count(a.atoms, a.linear, a.d, SchemeKind::Compact)?;
    let modes = 3 * a.atoms - if a.linear { 5 } else { 6 };
    let header = Header::new(json!({ "command": "encode-info", "atoms": a.atoms, "d": a.d, "linear": a.linear }));
    let result = json!({
        "modes": modes,
        "levels": a.d,
        "direct_qubits": direct,
        "compact_qubits": compact,
    });
    emit(&json_document(&header, result)?, a.out.output.as_deref())
}
