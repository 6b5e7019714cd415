// JSON shapes exchanged with the agilemap HTTP API.

export interface MapMetadataDto {
    name: string;
    version: string;
    source: string;
}

export interface PracticeDto {
    id: string;
    name: string;
    category: string;
    description: string;
    sources: string[];
    excluded: boolean;
    exclusionReason: string;
    nonSpecific: boolean;
    objectives: string[];
}

export interface RelationDto {
    source: string;
    target: string;
    type: string;
    bidirectional: boolean;
}

export interface JsonGraph {
    metadata: MapMetadataDto;
    practices: PracticeDto[];
    relations: RelationDto[];
}

export interface SupportSuggestionDto {
    id: string;
    justification: string;
}

export interface AlternativeHintDto {
    missing: string;
    alternatives: string[];
}

export interface SelectionReportDto {
    closure: string[];
    missingRequired: string[];
    supportSuggestions: SupportSuggestionDto[];
    alternativeHints: AlternativeHintDto[];
    warnings: string[];
}

export interface PlanDto {
    stages: string[][];
    byCategory: Record<string, string[]>;
}

export interface ApiErrorDto {
    code: string;
    message: string;
    details: unknown;
}
