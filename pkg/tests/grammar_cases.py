"""Grammar conformance table: (source, fully parenthesized form, value) and
(source, offset) error cases. Variables bind x=2, y=3, s=0.5, t=4."""

import math

BINDINGS = {"x": 2.0, "y": 3.0, "s": 0.5, "t": 4.0}

VALID = [
    ("1", "1", 1.0),
    ("2.5", "2.5", 2.5),
    (".5", "0.5", 0.5),
    ("1e3", "1000", 1000.0),
    ("1.5e-2", "0.015", 0.015),
    ("x", "x", 2.0),
    ("1+2*3", "(1+(2*3))", 7.0),
    ("(1+2)*3", "((1+2)*3)", 9.0),
    ("1-2-3", "((1-2)-3)", -4.0),
    ("8/4/2", "((8/4)/2)", 1.0),
    ("2^3^2", "(2^(3^2))", 512.0),
    ("-2^2", "(-(2^2))", -4.0),
    ("(-2)^2", "((-2)^2)", 4.0),
    ("2^-1", "(2^(-1))", 0.5),
    ("--1", "(-(-1))", 1.0),
    ("2*-3", "(2*(-3))", -6.0),
    ("1+2-3+4", "(((1+2)-3)+4)", 4.0),
    ("2*3/4*5", "(((2*3)/4)*5)", 7.5),
    ("1+2^2*3", "(1+((2^2)*3))", 13.0),
    ("x*y+s", "((x*y)+s)", 6.5),
    ("x-y*t", "(x-(y*t))", -10.0),
    ("(x-y)^2", "((x-y)^2)", 1.0),
    ("ln(1)", "ln(1)", 0.0),
    ("exp(0)", "exp(0)", 1.0),
    ("sqrt(t)", "sqrt(t)", 2.0),
    ("abs(x-y)", "abs((x-y))", 1.0),
    ("min(x,y)", "min(x,y)", 2.0),
    ("max(s,t)", "max(s,t)", 4.0),
    ("min(1,max(2,3))", "min(1,max(2,3))", 1.0),
    ("s+t+s*t", "((s+t)+(s*t))", 6.5),
    ("-1/t", "((-1)/t)", -0.25),
    ("ln(t)+t", "(ln(t)+t)", math.log(4.0) + 4.0),
    ("  1 +\t2 ", "(1+2)", 3.0),
    ("2^x^0", "(2^(x^0))", 2.0),
    ("-x^2", "(-(x^2))", -4.0),
    ("exp(ln(y))", "exp(ln(y))", 3.0),
    ("((((x))))", "x", 2.0),
    ("1/2/2/2", "(((1/2)/2)/2)", 0.125),
    ("t^0.5", "(t^0.5)", 2.0),
    ("max(-x,-y)", "max((-x),(-y))", -2.0),
]

ERRORS = [
    ("", 0),
    ("1+", 2),
    ("(1+2", 4),
    ("1 2", 2),
    ("q", 0),
    ("ln(", 3),
    ("ln(1,2)", 4),
    ("min(1)", 5),
    ("foo(1)", 0),
    ("1 + * 2", 4),
    ("2^", 2),
    (")", 0),
    ("t$", 1),
    ("x+(y", 4),
    ("max(1,2", 7),
    ("é+1", 0),
    ("1+é", 2),
]
