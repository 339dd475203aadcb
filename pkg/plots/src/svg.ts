/** Minimal SVG scene builder: one x/y panel with ticks, series, labels. */

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export class Panel {
  readonly width: number;
  readonly height: number;
  private readonly m: Margins = { left: 64, right: 16, top: 36, bottom: 48 };
  private body: string[] = [];
  private legend: { label: string; color: string; dashed: boolean }[] = [];

  constructor(
    readonly x0: number,
    readonly x1: number,
    readonly y0: number,
    readonly y1: number,
    width = 640,
    height = 440,
  ) {
    this.width = width;
    this.height = height;
  }

  px(x: number): number {
    return this.m.left + ((x - this.x0) / (this.x1 - this.x0)) * (this.width - this.m.left - this.m.right);
  }

  py(y: number): number {
    return this.height - this.m.bottom - ((y - this.y0) / (this.y1 - this.y0)) * (this.height - this.m.top - this.m.bottom);
  }

  points(xs: number[], ys: number[], color = "black", r = 3): void {
    for (let i = 0; i < xs.length; i++) {
      this.body.push(`<circle cx="${this.px(xs[i]).toFixed(2)}" cy="${this.py(ys[i]).toFixed(2)}" r="${r}" fill="${color}"/>`);
    }
  }

  errorBars(xs: number[], ys: number[], err: number[], color = "black"): void {
    for (let i = 0; i < xs.length; i++) {
      if (!Number.isFinite(err[i]) || err[i] <= 0) continue;
      const x = this.px(xs[i]).toFixed(2);
      const a = this.py(ys[i] - err[i]).toFixed(2);
      const b = this.py(ys[i] + err[i]).toFixed(2);
      this.body.push(`<line x1="${x}" y1="${a}" x2="${x}" y2="${b}" stroke="${color}" stroke-width="1"/>`);
    }
  }

  polyline(xs: number[], ys: number[], color: string, label?: string, dashed = false): void {
    const pts = xs.map((x, i) => `${this.px(x).toFixed(2)},${this.py(ys[i]).toFixed(2)}`).join(" ");
    const dash = dashed ? ' stroke-dasharray="6 4"' : "";
    this.body.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"${dash}/>`);
    if (label) this.legend.push({ label, color, dashed });
  }

  annotate(text: string, x: number, y: number, color = "black"): void {
    this.body.push(
      `<text x="${this.px(x).toFixed(2)}" y="${this.py(y).toFixed(2)}" font-size="12" fill="${color}">${esc(text)}</text>`,
    );
  }

  render(title: string, xlabel: string, ylabel: string): string {
    const out: string[] = [];
    out.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
    );
    out.push(`<rect width="${this.width}" height="${this.height}" fill="white"/>`);
    const { left, right, top, bottom } = this.m;
    const bx0 = left, bx1 = this.width - right, by0 = top, by1 = this.height - bottom;
    out.push(`<rect x="${bx0}" y="${by0}" width="${bx1 - bx0}" height="${by1 - by0}" fill="none" stroke="black"/>`);
    for (let i = 0; i <= 5; i++) {
      const xv = this.x0 + (i * (this.x1 - this.x0)) / 5;
      const yv = this.y0 + (i * (this.y1 - this.y0)) / 5;
      const xp = this.px(xv), yp = this.py(yv);
      out.push(`<line x1="${xp}" y1="${by1}" x2="${xp}" y2="${by1 + 5}" stroke="black"/>`);
      out.push(`<text x="${xp}" y="${by1 + 18}" font-size="11" text-anchor="middle">${xv.toPrecision(3)}</text>`);
      out.push(`<line x1="${bx0 - 5}" y1="${yp}" x2="${bx0}" y2="${yp}" stroke="black"/>`);
      out.push(`<text x="${bx0 - 8}" y="${yp + 4}" font-size="11" text-anchor="end">${yv.toPrecision(3)}</text>`);
    }
    out.push(`<text x="${(bx0 + bx1) / 2}" y="20" font-size="14" text-anchor="middle">${esc(title)}</text>`);
    out.push(`<text x="${(bx0 + bx1) / 2}" y="${this.height - 10}" font-size="12" text-anchor="middle">${esc(xlabel)}</text>`);
    out.push(
      `<text x="16" y="${(by0 + by1) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${(by0 + by1) / 2})">${esc(ylabel)}</text>`,
    );
    this.legend.forEach((e, i) => {
      const ly = by0 + 16 + 16 * i;
      const dash = e.dashed ? ' stroke-dasharray="6 4"' : "";
      out.push(`<line x1="${bx1 - 150}" y1="${ly}" x2="${bx1 - 120}" y2="${ly}" stroke="${e.color}" stroke-width="1.5"${dash}/>`);
      out.push(`<text x="${bx1 - 114}" y="${ly + 4}" font-size="11">${esc(e.label)}</text>`);
    });
    out.push(...this.body);
    out.push("</svg>");
    return out.join("\n") + "\n";
  }
}

export function bounds(values: number[], pad = 0.08): [number, number] {
  const finite = values.filter(Number.isFinite);
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}
