//! Scalar expressions of one variable, as written in job specs.
//!
//! Syntax is evalexpr's with three conveniences: bare integer literals are
//! floats (`1/8` is `0.125`), the usual functions need no `math::` prefix, and
//! `pi` and `e` are predefined. `^` is exponentiation.

use evalexpr::{
    build_operator_tree, Context, DefaultNumericTypes, EvalexprError, EvalexprResult, Node, Value,
};

use crate::error::{GipError, Result};
use crate::profile::{scalar_fn, ScalarFn};

const MATH_FUNCTIONS: &[&str] = &[
    "sin", "cos", "tan", "asin", "acos", "atan", "atan2", "sinh", "cosh", "tanh", "asinh", "acosh",
    "atanh", "sqrt", "cbrt", "exp", "exp2", "ln", "log2", "log10", "abs", "hypot", "pow",
];

#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    var: String,
    node: Node<DefaultNumericTypes>,
}

struct VarContext<'a> {
    name: &'a str,
    value: Value<DefaultNumericTypes>,
    pi: Value<DefaultNumericTypes>,
    e: Value<DefaultNumericTypes>,
}

impl Context for VarContext<'_> {
    type NumericTypes = DefaultNumericTypes;

    fn get_value(&self, identifier: &str) -> Option<&Value<DefaultNumericTypes>> {
        match identifier {
            id if id == self.name => Some(&self.value),
            "pi" => Some(&self.pi),
            "e" => Some(&self.e),
            _ => None,
        }
    }

    fn call_function(
        &self,
        identifier: &str,
        _argument: &Value<DefaultNumericTypes>,
    ) -> EvalexprResult<Value<DefaultNumericTypes>, DefaultNumericTypes> {
        Err(EvalexprError::FunctionIdentifierNotFound(
            identifier.to_string(),
        ))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(
        &mut self,
        disabled: bool,
    ) -> EvalexprResult<(), DefaultNumericTypes> {
        if disabled {
            Err(EvalexprError::BuiltinFunctionsCannotBeDisabled)
        } else {
            Ok(())
        }
    }
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Promotes integer literals and qualifies math functions.
fn preprocess(src: &str) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev = if i > 0 { Some(chars[i - 1]) } else { None };
        let starts_token = prev.is_none_or(|p| !is_ident(p) && p != '.' && p != ':');
        if c.is_ascii_digit() && starts_token {
            let start = i;
            let mut is_float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.extend(&chars[start..i]);
            if !is_float {
                out.push_str(".0");
            }
            continue;
        }
        if c.is_ascii_alphabetic() && starts_token {
            let start = i;
            while i < chars.len() && is_ident(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let mut j = i;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j] == '(' && MATH_FUNCTIONS.contains(&word.as_str()) {
                out.push_str("math::");
            }
            out.push_str(&word);
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

impl Expr {
    /// Parses `source` as a function of the variable `var`.
    pub fn parse(source: &str, var: &str) -> Result<Self> {
        let node = build_operator_tree::<DefaultNumericTypes>(&preprocess(source))
            .map_err(|e| GipError::Invalid(format!("cannot parse expression `{source}`: {e}")))?;
        let expr = Self {
            source: source.to_string(),
            var: var.to_string(),
            node,
        };
        expr.eval(0.5)
            .map_err(|e| GipError::Invalid(format!("expression `{source}` in {var}: {e}")))?;
        Ok(expr)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let ctx = VarContext {
            name: &self.var,
            value: Value::Float(x),
            pi: Value::Float(std::f64::consts::PI),
            e: Value::Float(std::f64::consts::E),
        };
        self.node.eval_number_with_context(&ctx).map_err(|e| {
            GipError::Numeric(format!(
                "evaluating `{}` at {} = {x}: {e}",
                self.source, self.var
            ))
        })
    }

    /// Evaluation errors become NaN, which downstream checks reject.
    pub fn into_fn(self) -> ScalarFn {
        scalar_fn(move |x| self.eval(x).unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_are_floats() {
        assert_eq!(Expr::parse("1/8", "s").unwrap().eval(0.0).unwrap(), 0.125);
        assert_eq!(preprocess("x^2 + 10*x1"), "x^2.0 + 10.0*x1");
        assert_eq!(preprocess("1e-3 + 2.5E2 + 3"), "1e-3 + 2.5E2 + 3.0");
    }

    #[test]
    fn functions_and_constants() {
        let e = Expr::parse("sqrt(1 + xi^2) + sin(pi/2) + ln(e)", "xi").unwrap();
        assert!((e.eval(0.0).unwrap() - 3.0).abs() < 1e-15);
        let e = Expr::parse("1 + 0.3*sin(s)", "s").unwrap();
        assert!((e.eval(1.0).unwrap() - (1.0 + 0.3 * 1f64.sin())).abs() < 1e-15);
        assert_eq!(
            Expr::parse("0.2/rho", "rho").unwrap().eval(2.0).unwrap(),
            0.1
        );
    }

    #[test]
    fn bad_expressions_are_rejected() {
        assert!(Expr::parse("1 +", "s").is_err());
        assert!(Expr::parse("y + 1", "s").is_err());
        assert!(Expr::parse("foo(s)", "s").is_err());
    }
}
