package org.jabref.model;

import java.util.Map;

public class Entry {
    private Map<String, String> fields;
}
