//! `moment` subcommand: one closed-form value.

use serde::Serialize;

use multimoments::{
    central_moment, factorial_moment, raw_moment, validate_params, Exact, FactorialOrders,
    MomentError, Scalar,
};

use crate::args::{parse_list, parse_probabilities};
use crate::{CliError, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Raw,
    Central,
    Factorial,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Raw => "raw",
            Kind::Central => "central",
            Kind::Factorial => "factorial",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentRequest {
    pub kind: Kind,
    pub m: u64,
    pub x: String,
    pub indices: Option<String>,
    pub orders: Option<String>,
    pub exact: bool,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MomentOutput {
    pub kind: String,
    pub m: u64,
    pub x: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u32>>,
    pub mode: String,
    pub value: String,
}

pub fn compute(req: &MomentRequest) -> Result<MomentOutput, CliError> {
    if req.exact {
        compute_in::<Exact>(req)
    } else {
        compute_in::<f64>(req)
    }
}

fn compute_in<S: Scalar>(req: &MomentRequest) -> Result<MomentOutput, CliError> {
    let x: Vec<S> = parse_probabilities(&req.x)?;
    let params = validate_params(req.m, x)?;
    let mut out = MomentOutput {
        kind: req.kind.as_str().to_string(),
        m: req.m,
        x: params.x().iter().map(Scalar::render).collect(),
        indices: None,
        orders: None,
        mode: S::MODE.as_str().to_string(),
        value: String::new(),
    };
    let value: S = match req.kind {
        Kind::Raw | Kind::Central => {
            if req.orders.is_some() {
                return Err(CliError::usage("--orders only applies to factorial moments"));
            }
            let text = req
                .indices
                .as_deref()
                .ok_or_else(|| CliError::usage("--indices is required for raw and central moments"))?;
            let indices: Vec<usize> = parse_list(text, "index")?;
            let v = if req.kind == Kind::Raw {
                raw_moment(&params, &indices)?
            } else {
                central_moment(&params, &indices)?
            };
            out.indices = Some(indices);
            v
        }
        Kind::Factorial => {
            if req.indices.is_some() {
                return Err(CliError::usage("--indices does not apply to factorial moments"));
            }
            let text = req
                .orders
                .as_deref()
                .ok_or_else(|| CliError::usage("--orders is required for factorial moments"))?;
            let orders: Vec<u32> = parse_list(text, "order")?;
            let v = factorial_moment(&params, &FactorialOrders::new(orders.clone()))?;
            out.orders = Some(orders);
            v
        }
    };
    out.value = value.render();
    Ok(out)
}

pub fn render(out: &MomentOutput, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(out).expect("serializable"),
        Format::Csv => {
            let join = |v: &[String]| v.join(";");
            let ints = |v: Option<Vec<String>>| v.map(|v| join(&v)).unwrap_or_default();
            format!(
                "kind,m,x,indices,orders,mode,value\n{},{},{},{},{},{},{}",
                out.kind,
                out.m,
                join(&out.x),
                ints(out.indices.as_ref().map(|v| v.iter().map(usize::to_string).collect())),
                ints(out.orders.as_ref().map(|v| v.iter().map(u32::to_string).collect())),
                out.mode,
                out.value
            )
        }
    }
}

pub fn cmd_moment(req: &MomentRequest) -> Result<String, CliError> {
    compute(req).map(|out| render(&out, req.format))
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        CliError::Validation(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(kind: Kind, m: u64, x: &str, indices: Option<&str>, exact: bool) -> MomentRequest {
        MomentRequest {
            kind,
            m,
            x: x.into(),
            indices: indices.map(Into::into),
            orders: None,
            exact,
            format: Format::Json,
        }
    }

    #[test]
    fn examples() {
        let out = compute(&req(Kind::Central, 2, "1/2,1/4", Some("1,1,2,2"), true)).unwrap();
        assert_eq!(out.value, "1/4");
        let out = compute(&req(Kind::Raw, 3, "1/2,1/5", Some("1"), false)).unwrap();
        assert_eq!(out.value, "1.5");
        let err = compute(&req(Kind::Central, 2, "0.7,0.5", Some("1,2"), false)).unwrap_err();
        assert!(matches!(err, CliError::Validation(MomentError::SimplexViolation(_))));
    }

    #[test]
    fn factorial_needs_orders() {
        let mut r = req(Kind::Factorial, 2, "1/2,1/4", None, true);
        assert!(matches!(compute(&r), Err(CliError::Usage(_))));
        r.orders = Some("2,0".into());
        assert_eq!(compute(&r).unwrap().value, "1/2");
    }
}
