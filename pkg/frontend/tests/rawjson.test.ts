import { describe, expect, it } from 'vitest';
import { numberLiterals } from '../src/rawjson.js';

describe('numberLiterals', () => {
  it('returns number source text byte for byte', () => {
    const text =
      '{"a": 1.955e-05, "b": [0.0213, -0.0112, 1e+200], ' +
      '"c": {"d": 0.07149427892234784}, "e": 0}';
    const lits = numberLiterals(text);
    expect(lits.get('a')).toBe('1.955e-05');
    expect(lits.get('b.0')).toBe('0.0213');
    expect(lits.get('b.1')).toBe('-0.0112');
    expect(lits.get('b.2')).toBe('1e+200');
    expect(lits.get('c.d')).toBe('0.07149427892234784');
    expect(lits.get('e')).toBe('0');
  });

  it('keeps formats that JS would rewrite', () => {
    // String(1.955e-5) is "0.00001955" and String(1e2) is "100"; the raw
    // literal must survive untouched
    const lits = numberLiterals('{"x": 1.955e-05, "y": 1E2, "z": 5.0e-1}');
    expect(lits.get('x')).toBe('1.955e-05');
    expect(lits.get('y')).toBe('1E2');
    expect(lits.get('z')).toBe('5.0e-1');
  });

  it('every literal parses to the value JSON.parse sees', () => {
    const text = JSON.stringify({
      motor: { time_constant_s: 0.07149427892234784, thrust_coeffs_n: [[0.02, -0.01, 0.12]] },
      inertia: { ixx_kg_m2: 1.066e-5, diagnostics: { roll_fit_rmse_nm: 3.2e-9 } },
      hover: { mean_command: [0.66, 0.65, 0.661, 0.6604] },
      nested: [[1, 2], [3, [4.5]]],
    });
    const lits = numberLiterals(text);
    const doc = JSON.parse(text) as unknown;
    for (const [path, lit] of lits) {
      let node: unknown = doc;
      for (const part of path.split('.')) {
        node = (node as Record<string, unknown>)[part];
      }
      expect(Number(lit)).toBe(node);
    }
    expect(lits.size).toBeGreaterThanOrEqual(12);
  });

  it('handles pretty-printed documents and escaped strings', () => {
    const text = '{\n  "wei\\"rd key": 3.25,\n  "s": "no \\"numbers\\" 42 here",\n  "n": -0.5\n}\n';
    const lits = numberLiterals(text);
    expect(lits.get('wei"rd key')).toBe('3.25');
    expect(lits.get('n')).toBe('-0.5');
    expect(lits.has('s')).toBe(false);
    expect(lits.size).toBe(2);
  });

  it('ignores numbers inside strings and booleans', () => {
    const lits = numberLiterals('{"a": "1.5", "b": true, "c": null, "d": 2}');
    expect([...lits.keys()]).toEqual(['d']);
  });

  it('indexes arrays of objects by position', () => {
    const lits = numberLiterals('{"inputs": [{"n": 1}, {"n": 2}]}');
    expect(lits.get('inputs.0.n')).toBe('1');
    expect(lits.get('inputs.1.n')).toBe('2');
  });

  it('rejects malformed documents', () => {
    expect(() => numberLiterals('{"a": }')).toThrow(SyntaxError);
    expect(() => numberLiterals('{"a": 1} trailing')).toThrow(SyntaxError);
    expect(() => numberLiterals('{"a": 1')).toThrow(SyntaxError);
  });
});
