/** Application shell: sign-in, role-gated tabs, page mounting. */

import { ApiClient, ApiError } from "./api.js";
import { clear, docOf, el } from "./dom.js";
import { AccessPage } from "./pages/access.js";
import { ArbiterPage } from "./pages/arbiter.js";
import { ConsentPage } from "./pages/consent.js";
import { PassportsPage } from "./pages/passports.js";
import { RegistryPage } from "./pages/registry.js";
import { PAGE_TITLES, PageId, pagesFor } from "./session.js";
import type { WhoAmI } from "./types.js";

export class App {
  pending: Promise<void> = Promise.resolve();
  private api: ApiClient | undefined;
  private identity: WhoAmI | undefined;

  constructor(
    private root: HTMLElement,
    private makeClient: (token: string) => ApiClient,
  ) {}

  start(): void {
    this.renderSignIn();
  }

  async signIn(token: string): Promise<void> {
    const api = this.makeClient(token);
    try {
      this.identity = await api.whoami();
    } catch (exc) {
      const message =
        exc instanceof ApiError && exc.status === 401
          ? "Unknown account id."
          : String(exc);
      this.renderSignIn(message);
      return;
    }
    this.api = api;
    const pages = pagesFor(this.identity.role);
    this.renderShell(pages);
    if (pages.length > 0) {
      await this.open(pages[0] as PageId);
    }
  }

  async open(page: PageId): Promise<void> {
    if (!this.api || !this.identity) return;
    const doc = docOf(this.root);
    const outlet = this.root.querySelector("#outlet") as HTMLElement | null;
    if (!outlet) return;
    clear(outlet);
    const mount = el(doc, "div", { attrs: { "data-page": page } });
    outlet.appendChild(mount);
    switch (page) {
      case "consent":
        await new ConsentPage(mount, this.api).load();
        break;
      case "passports":
        await new PassportsPage(mount, this.api).load();
        break;
      case "access":
        new AccessPage(mount, this.api).load();
        break;
      case "dashboard":
        await new ArbiterPage(mount, this.api).load();
        break;
      case "registry":
        await new RegistryPage(mount, this.api).load();
        break;
    }
  }

  private renderSignIn(message = ""): void {
    const doc = docOf(this.root);
    clear(this.root);
    const input = el(doc, "input", {
      attrs: { name: "token", placeholder: "account id" },
    }) as HTMLInputElement;
    this.root.appendChild(
      el(doc, "div", {
        className: "sign-in",
        children: [
          el(doc, "h1", { text: "glasspass" }),
          input,
          el(doc, "button", {
            text: "Sign in",
            attrs: { "data-action": "sign-in" },
            onClick: () => {
              this.pending = this.signIn(input.value.trim());
            },
          }),
          ...(message
            ? [el(doc, "p", { className: "error", text: message })]
            : []),
        ],
      }),
    );
  }

  private renderShell(pages: PageId[]): void {
    const doc = docOf(this.root);
    const identity = this.identity as WhoAmI;
    clear(this.root);
    const tabs = pages.map((page) =>
      el(doc, "button", {
        className: "tab",
        text: PAGE_TITLES[page],
        attrs: { "data-tab": page },
        onClick: () => {
          this.pending = this.open(page);
        },
      }),
    );
    this.root.appendChild(
      el(doc, "header", {
        children: [
          el(doc, "strong", { text: "glasspass" }),
          el(doc, "span", {
            className: "who",
            text: `${identity.display_name || identity.account_id} (${identity.role})`,
          }),
          el(doc, "nav", { children: tabs }),
        ],
      }),
    );
    this.root.appendChild(el(doc, "main", { attrs: { id: "outlet" } }));
  }
}

/** Browser entry point; tests construct App directly instead. */
export function boot(root: HTMLElement, baseUrl = ""): App {
  const app = new App(root, (token) => new ApiClient(baseUrl, token));
  app.start();
  return app;
}
