#!/usr/bin/env python3
"""Reference interpreter for the coefficient expression grammar.

Writes tab-separated rows: expression, t, value, derivative. Values come
from an independent recursive-descent evaluator; derivatives from sympy.
"""
import math
import sys

import sympy

FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp, "log": math.log,
    "sqrt": math.sqrt, "abs": abs, "sinh": math.sinh, "cosh": math.cosh,
}


def tokenize(s):
    out, i = [], 0
    while i < len(s):
        c = s[i]
        if c in " \t":
            i += 1
        elif c.isdigit() or c == ".":
            j = i
            while j < len(s) and (s[j].isdigit() or s[j] == "."):
                j += 1
            if j < len(s) and s[j] in "eE":
                k = j + 1
                if k < len(s) and s[k] in "+-":
                    k += 1
                if k < len(s) and s[k].isdigit():
                    while k < len(s) and s[k].isdigit():
                        k += 1
                    j = k
            out.append(("num", float(s[i:j])))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(s) and (s[j].isalnum() or s[j] == "_"):
                j += 1
            out.append(("id", s[i:j]))
            i = j
        else:
            out.append(("op", c))
            i += 1
    return out


class Eval:
    def __init__(self, text, t):
        self.toks, self.i, self.t = tokenize(text), 0, t

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, v):
        if self.peek() == ("op", v):
            self.i += 1
            return True
        return False

    def expr(self):
        v = self.term()
        while True:
            if self.take("+"):
                v += self.term()
            elif self.take("-"):
                v -= self.term()
            else:
                return v

    def term(self):
        v = self.unary()
        while True:
            if self.take("*"):
                v *= self.unary()
            elif self.take("/"):
                v /= self.unary()
            else:
                return v

    def unary(self):
        if self.take("-"):
            return -self.unary()
        b = self.primary()
        if self.take("^"):
            return math.pow(b, self.unary())
        return b

    def primary(self):
        kind, v = self.peek()
        self.i += 1
        if kind == "num":
            return v
        if kind == "op" and v == "(":
            r = self.expr()
            assert self.take(")")
            return r
        if kind == "id":
            if self.take("("):
                a = self.expr()
                if v == "pow":
                    assert self.take(",")
                    b = self.expr()
                    assert self.take(")")
                    return math.pow(a, b)
                assert self.take(")")
                return FUNCS[v](a)
            return {"t": self.t, "pi": math.pi}[v]
        raise ValueError(f"bad token {kind} {v}")


def evaluate(text, t):
    e = Eval(text, t)
    v = e.expr()
    assert e.i == len(e.toks)
    return v


def derivative(text, t):
    T = sympy.Symbol("t", real=True)
    s = text.replace("^", "**")
    f = sympy.sympify(s, locals={"t": T, "pi": sympy.pi, "abs": sympy.Abs, "pow": sympy.Pow,
                                 "log": sympy.log, "sqrt": sympy.sqrt})
    return float(sympy.diff(f, T).subs(T, t).evalf(30))


EXPRESSIONS = [
    "1", "42", "3.25", ".5", "2.", "1e-3", "2.5E+2", "7e1", "t", "pi",
    "t+1", "t-2", "2*t", "t/3", "t^2", "-t", "-t^2", "(-t)^2", "2^3^t", "t^-1",
    "2^-t", "1-t-t", "1/t/2", "(t+1)*(t-1)", "((t))", "-(-(t))", "sin(t)", "cos(t)", "tan(t/2)", "exp(-t)",
    "log(t)", "sqrt(t)", "abs(t-1.5)", "sinh(t)", "cosh(t)", "pow(t, 3)", "pow(t, t)", "t^t", "sin(t)^2 + cos(t)^2",
    "t^2/(1+t)", "exp(sin(t))*log(1+t^2)", "sqrt(1+cosh(t))/(2+sin(3*t))", "pow(1+t, -0.5)", "1 + 2*t - 3*t^2 + 4*t^3",
    "3*exp(-t/2)*sin(2*t)", "-exp(-t)*sin(2*t)", "abs(sin(t))*t", "tan(t/2)^2 - 1/cos(t/2)^2", "2^t*3^-t", "sinh(t)/cosh(t)",
]

TS = [0.25 + 0.13 * k for k in range(20)]


def main(path):
    with open(path, "w", newline="\n") as f:
        f.write("# expression\tt\tvalue\tderivative\n")
        for e in EXPRESSIONS:
            for t in TS:
                f.write(f"{e}\t{t!r}\t{evaluate(e, t)!r}\t{derivative(e, t)!r}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/golden/expressions.tsv")
