/** Role-gated navigation: which pages each signed-in role may open.

This mirrors the server's permission matrix at page granularity; the
server remains the enforcement point, the client only hides what would
be denied anyway.
*/

import type { Role } from "./types.js";

export type PageId = "consent" | "passports" | "access" | "dashboard" | "registry";

export const PAGES_BY_ROLE: Record<Role, PageId[]> = {
  Administrator: ["registry"],
  Citizen: ["consent", "passports"],
  Actor: ["access"],
  Arbiter: ["dashboard"],
};

export const PAGE_TITLES: Record<PageId, string> = {
  consent: "Consent",
  passports: "Passports",
  access: "Access",
  dashboard: "Dashboard",
  registry: "Registry",
};

export function pagesFor(role: Role): PageId[] {
  return PAGES_BY_ROLE[role] ?? [];
}

export function canOpen(role: Role, page: PageId): boolean {
  return pagesFor(role).includes(page);
}
