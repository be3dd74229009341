use std::io::Write;
use std::sync::Arc;

use super::form::{AlgForm, EvalFn, FormValue};
use crate::error::{GeomError, Result};
use crate::lie::LieAlgebra;

/// Step growth when differentiating values that are themselves difference
/// quotients; keeps roundoff from being divided by `h` twice.
pub const NESTED_STEP_FACTOR: f64 = 10.0;

/// `d` on 0- and 1-forms: `(df)_i = d_i f`, `(d lambda)_ij = d_i lambda_j - d_j lambda_i`.
pub fn exterior_derivative(form: &AlgForm) -> Result<AlgForm> {
    let degree = form.degree();
    if degree > 1 {
        return Err(GeomError::UnsupportedDegree(degree + 1));
    }
    let src = form.clone();
    let m = form.chart().dim();
    let n = form.algebra().dim();
    let eval: EvalFn = Arc::new(move |x| {
        let partials = src.partials(x)?;
        let mut out = FormValue::zeros(degree + 1, m, n);
        if degree == 0 {
            for (i, d) in partials.iter().enumerate() {
                out.one_mut(i).copy_from_slice(d.scalar());
            }
        } else {
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let (di_lj, dj_li) = (partials[i].one(j), partials[j].one(i));
                    for (o, (a, b)) in out.two_mut(i, j).iter_mut().zip(di_lj.iter().zip(dj_li)) {
                        *o = a - b;
                    }
                }
            }
        }
        Ok(out.into_data())
    });
    let step = if form.has_closed_form() {
        form.fd_step()
    } else {
        form.fd_step().scaled(NESTED_STEP_FACTOR)
    };
    AlgForm::new(degree + 1, form.chart().clone(), form.algebra().clone(), eval)?
        .with_mode(super::DerivativeMode::FiniteDifference(step))
}

/// `[lambda ^ mu](u, v) = [lambda(u), mu(v)] - [lambda(v), mu(u)]` at a point.
pub fn wedge_bracket_value(alg: &LieAlgebra, lambda: &FormValue, mu: &FormValue) -> FormValue {
    let m = lambda.dim();
    let mut out = FormValue::zeros(2, m, alg.dim());
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let slot = out.two_mut(i, j);
            alg.bracket_acc(lambda.one(i), mu.one(j), 1.0, slot);
            alg.bracket_acc(lambda.one(j), mu.one(i), -1.0, slot);
        }
    }
    out
}

pub fn wedge_bracket(lambda: &AlgForm, mu: &AlgForm) -> Result<AlgForm> {
    if lambda.degree() != 1 || mu.degree() != 1 {
        return Err(GeomError::UnsupportedDegree(lambda.degree().max(mu.degree())));
    }
    lambda.check_compatible(mu)?;
    let (a, b) = (lambda.clone(), mu.clone());
    let eval: EvalFn = Arc::new(move |x| {
        let (u, v) = (a.value(x)?, b.value(x)?);
        Ok(wedge_bracket_value(a.algebra(), &u, &v).into_data())
    });
    AlgForm::new(2, lambda.chart().clone(), lambda.algebra().clone(), eval)?
        .with_mode(super::DerivativeMode::FiniteDifference(lambda.fd_step()))
}

/// Square root of the summed squared norms of the independent components.
pub fn form_value_norm(alg: &LieAlgebra, value: &FormValue) -> Result<f64> {
    let mut sum = 0.0;
    for idx in value.index_tuples() {
        let c = value.component(&idx);
        sum += alg.inner(c, c)?;
    }
    Ok(sum.max(0.0).sqrt())
}

pub fn form_norm(form: &AlgForm, x: &[f64]) -> Result<f64> {
    if form.algebra().inner_product().is_none() {
        return Err(GeomError::MissingInnerProduct);
    }
    form_value_norm(form.algebra(), &form.value(x)?)
}

/// Largest norm of a single independent component, e.g. `max_{i<j} |omega(d_i, d_j)|`.
/// Uses the inner product when present, Euclidean coordinates otherwise.
pub fn max_component_norm(alg: &LieAlgebra, value: &FormValue) -> f64 {
    value
        .index_tuples()
        .iter()
        .map(|idx| alg.residual_norm(value.component(idx)))
        .fold(0.0, f64::max)
}

/// Writes one CSV row per point: coordinates, then each independent component.
pub fn write_grid_csv<W: Write>(form: &AlgForm, points: &[Vec<f64>], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let chart = form.chart();
    let labels = form.algebra().labels();
    let probe = FormValue::zeros(form.degree(), chart.dim(), labels.len());
    let mut header: Vec<String> = chart.names().to_vec();
    for idx in probe.index_tuples() {
        let suffix: String = idx.iter().map(|i| (i + 1).to_string()).collect();
        for l in labels {
            if suffix.is_empty() {
                header.push(l.clone());
            } else {
                header.push(format!("d{suffix}.{l}"));
            }
        }
    }
    out.write_record(&header)?;
    for x in points {
        let v = form.value(x)?;
        let mut row: Vec<String> = x.iter().map(|c| format!("{c:e}")).collect();
        for idx in v.index_tuples() {
            row.extend(v.component(&idx).iter().map(|c| format!("{c:e}")));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
