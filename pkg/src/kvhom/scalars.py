"""Exact scalars: rationals (field tag ``Q``) and Gaussian rationals (``Qi``).

Rationals are plain :class:`fractions.Fraction`.  Gaussian rationals are a
small immutable pair type.  A :class:`Field` object bundles parsing,
coercion and formatting for one tag.
"""

from fractions import Fraction

__all__ = ["GaussianRational", "Field", "QQ", "QQi", "field_for", "fmt", "parse"]


class GaussianRational:
    """a + b i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        return GaussianRational._lift(other) / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return fmt(self)


def _fmt_q(x):
    x = Fraction(x)
    return str(x)


def fmt(x):
    """Serialize a scalar as ``"p/q"`` or ``"p/q+r/s i"``."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return _fmt_q(x.re)
        sign = "-" if x.im < 0 else "+"
        return f"{_fmt_q(x.re)}{sign}{_fmt_q(abs(x.im))} i"
    return _fmt_q(x)


def parse(s, field="Q"):
    """Parse a scalar string; ``field`` decides whether ``i`` is allowed."""
    if isinstance(s, (int, Fraction, GaussianRational)):
        return field_for(field).coerce(s)
    if not isinstance(s, str):
        raise ValueError(f"scalar must be a string or integer, got {s!r}")
    t = s.strip()
    if "i" not in t:
        try:
            q = Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad scalar {s!r}") from exc
        return field_for(field).coerce(q)
    if field != "Qi":
        raise ValueError(f"imaginary scalar {s!r} needs field Qi")
    if not t.endswith("i"):
        raise ValueError(f"bad scalar {s!r}")
    body = t[:-1].strip()
    cut = max(body.rfind("+"), body.rfind("-"))
    re_txt, im_txt = (body[:cut], body[cut:]) if cut > 0 else ("", body)
    im_txt = im_txt.replace(" ", "")
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    try:
        re_val = Fraction(re_txt.strip()) if re_txt.strip() else Fraction(0)
        im_val = Fraction(im_txt)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad scalar {s!r}") from exc
    return GaussianRational(re_val, im_val)


class Field:
    """Per-session scalar field: ``Q`` or ``Qi``."""

    def __init__(self, tag):
        if tag not in ("Q", "Qi"):
            raise ValueError(f"unknown field tag {tag!r}")
        self.tag = tag

    @property
    def zero(self):
        return Fraction(0) if self.tag == "Q" else GaussianRational(0)

    @property
    def one(self):
        return Fraction(1) if self.tag == "Q" else GaussianRational(1)

    def coerce(self, x):
        if self.tag == "Q":
            if isinstance(x, GaussianRational):
                if x.im:
                    raise ValueError(f"{x} is not rational")
                return x.re
            return Fraction(x)
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(x)

    def parse(self, s):
        return parse(s, self.tag)

    def fmt(self, x):
        return fmt(x)

    def __eq__(self, other):
        return isinstance(other, Field) and other.tag == self.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"Field({self.tag!r})"


QQ = Field("Q")
QQi = Field("Qi")


def field_for(tag):
    if isinstance(tag, Field):
        return tag
    return QQ if tag == "Q" else QQi if tag == "Qi" else Field(tag)
