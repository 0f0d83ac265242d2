/** Arbiter dashboard: run verification, render violators and erasure audit.

A violator row carries one badge per reason; a clean report renders the
"no violations" empty state. The page always shows the latest stored
report and lets the arbiter generate a new one.
*/

import { clear, docOf, el } from "../dom.js";
import type { VerificationReport } from "../types.js";

export interface ArbiterApi {
  verify(citizen?: string): Promise<VerificationReport>;
  latestReport(): Promise<VerificationReport>;
}

export class ArbiterPage {
  pending: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    private api: ArbiterApi,
  ) {}

  /** Show the stored report if there is one; otherwise the idle state. */
  async load(): Promise<void> {
    try {
      this.render(await this.api.latestReport());
    } catch {
      this.render(undefined);
    }
  }

  async runVerification(): Promise<void> {
    this.render(await this.api.verify());
  }

  private render(report: VerificationReport | undefined): void {
    const doc = docOf(this.root);
    clear(this.root);
    this.root.appendChild(el(doc, "h2", { text: "Compliance dashboard" }));
    this.root.appendChild(
      el(doc, "button", {
        text: "Run verification",
        attrs: { "data-action": "run-verification" },
        onClick: () => {
          this.pending = this.runVerification();
        },
      }),
    );
    if (!report) {
      this.root.appendChild(
        el(doc, "p", { className: "idle", text: "No report generated yet." }),
      );
      return;
    }
    this.root.appendChild(
      el(doc, "p", {
        className: "report-meta",
        text: `Report #${report.id} covering ${report.citizens.length} citizen(s)`,
      }),
    );
    this.root.appendChild(this.violatorSection(doc, report));
    this.root.appendChild(this.erasureSection(doc, report));
  }

  private violatorSection(doc: Document, report: VerificationReport): HTMLElement {
    const section = el(doc, "section", {
      attrs: { "data-testid": "violations" },
      children: [el(doc, "h3", { text: "Consent violations" })],
    });
    if (report.violators.length === 0) {
      section.appendChild(
        el(doc, "p", {
          className: "empty",
          attrs: { "data-testid": "no-violations" },
          text: "no violations",
        }),
      );
      return section;
    }
    const body = el(doc, "tbody");
    for (const violator of report.violators) {
      const badges = (report.reasons[violator] ?? []).map((reason) =>
        el(doc, "span", {
          className: "badge",
          attrs: { "data-reason": reason },
          text: reason,
        }),
      );
      body.appendChild(
        el(doc, "tr", {
          attrs: { "data-testid": `violator-${violator}` },
          children: [
            el(doc, "td", { className: "violator-name", text: violator }),
            el(doc, "td", { children: badges }),
          ],
        }),
      );
    }
    section.appendChild(
      el(doc, "table", {
        children: [
          el(doc, "thead", {
            children: [
              el(doc, "tr", {
                children: ["Violator", "Reasons"].map((text) =>
                  el(doc, "th", { text }),
                ),
              }),
            ],
          }),
          body,
        ],
      }),
    );
    return section;
  }

  private erasureSection(doc: Document, report: VerificationReport): HTMLElement {
    const section = el(doc, "section", {
      attrs: { "data-testid": "erasures" },
      children: [el(doc, "h3", { text: "Erasure audit" })],
    });
    if (report.erasure_violations.length === 0) {
      section.appendChild(
        el(doc, "p", {
          className: "empty",
          text: `no erasure violations (${report.pending_erasures.length} pending)`,
        }),
      );
      return section;
    }
    const list = el(doc, "ul");
    for (const violation of report.erasure_violations) {
      list.appendChild(
        el(doc, "li", {
          children: [
            el(doc, "span", {
              className: "badge",
              attrs: { "data-reason": violation.kind },
              text: violation.kind,
            }),
            el(doc, "span", {
              text: ` ${violation.citizen} / ${violation.anon_cid.slice(0, 12)}...`,
            }),
          ],
        }),
      );
    }
    section.appendChild(list);
    return section;
  }
}
